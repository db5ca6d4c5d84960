"""Command-line interface.

Subcommands: space, geodesic, busemann, spectrum, rank, riccati,
visibility, volume, verify.  Common flags select the instance (--preset
NAME[=q] or --spec FILE), the seed, named tolerance overrides, the output
format and destination; sweep/report paths can also render figures next
to the delimited output with --plot.

Exit codes: 0 ok, 1 check failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import busemann, geodesics, report, riccati, spectral, verify, visibility
from .algebra import (
    CliffordValidationError,
    build_algebra,
    load_spec,
    parse_preset,
    validate_spec,
)
from .space import DamekRicciSpace, random_unit_directions


def _add_instance_args(p):
    p.add_argument("--preset", default="quaternionic",
                   help="catalog instance, e.g. quaternionic, heisenberg_q=2")
    p.add_argument("--spec", default=None, metavar="FILE",
                   help="JSON spec file {m, k, generators}")


def _add_common_args(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VAL")
    p.add_argument("--format", choices=["text", "csv", "json-lines"],
                   default="text")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="render a figure to this file")


def _load_instance(args):
    if args.spec:
        return load_spec(args.spec)
    return parse_preset(args.preset)


def _space_from_args(args):
    return DamekRicciSpace(build_algebra(_load_instance(args)))


def _parse_tols(pairs):
    out = {}
    for item in pairs:
        name, _, val = item.partition("=")
        if not val:
            raise ValueError(f"bad --tol override {item!r}; expected NAME=VAL")
        out[name] = float(val)
    return out


def _parse_dir(space, values):
    vec = np.asarray([float(x) for x in values], dtype=float)
    if vec.shape != (space.n,):
        raise ValueError(f"--dir needs {space.n} components, got {len(values)}")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("--dir must be nonzero")
    return vec / norm


def _parse_point(space, values):
    vec = np.asarray([float(x) for x in values], dtype=float)
    if vec.shape != (space.n,):
        raise ValueError(f"--point needs {space.n} components (U, X, a)")
    return space.as_point((vec[: space.m], vec[space.m : space.m + space.k],
                           vec[-1]))


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand implementations

def cmd_space(args):
    if args.action == "build":
        try:
            spec = _load_instance(args)
            validate_spec(spec)
        except CliffordValidationError as exc:
            print(f"invalid instance: {exc}")
            return 1
        sp = DamekRicciSpace(build_algebra(spec))
        print(f"valid H-type instance: m={sp.m} k={sp.k} n={sp.n} Q={sp.Q:g}")
        return 0
    sp = _space_from_args(args)
    if args.action == "info":
        c, spread = sp.einstein_constant()
        print(f"m = {sp.m}\nk = {sp.k}\nn = {sp.n}\nQ = {sp.Q:g}")
        print(f"einstein constant = {c:.12g} (spread {spread:.3e})")
        return 0
    # action == "check": structural invariant suite
    name = "instance" if args.spec else args.preset.partition("=")[0]
    cfg = verify.RunConfig(seed=args.seed, quick=True,
                           tolerances=_parse_tols(args.tol),
                           instances={name: _load_instance(args)})
    ctx = verify.Context(cfg)
    rows = verify.check_htype_axioms(ctx) + verify.check_structural(ctx)
    _emit(args, report.format_check_rows(rows, args.format))
    return 0 if all(r.passed for r in rows) else 1


def cmd_geodesic(args):
    sp = _space_from_args(args)
    d = _parse_dir(sp, args.dir)
    p = geodesics.geodesic_point(sp, d, args.t)
    vel = geodesics.geodesic_velocity(sp, d, args.t)
    lines = [
        "point U = " + " ".join(f"{x:.12e}" for x in p.U),
        "point X = " + " ".join(f"{x:.12e}" for x in p.X),
        f"point a = {p.a:.12e}",
        "velocity = " + " ".join(f"{x:.12e}" for x in vel),
    ]
    if args.oracle:
        q = geodesics.geodesic_ode(sp, d, args.t, step=args.step)
        dev = max(np.max(np.abs(p.U - q.U)), np.max(np.abs(p.X - q.X)),
                  abs(p.a - q.a))
        lines.append(f"oracle deviation = {dev:.6e} (RK4 step {args.step:g})")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_volume(args):
    sp = _space_from_args(args)
    rs = np.linspace(args.rmin, args.rmax, args.samples)
    theta, sigma = geodesics.volume_density(sp, rs)
    ratio = geodesics.volume_growth_ratio(sp, rs)
    rows = [(float(r), float(t), float(g), float(s))
            for r, t, g, s in zip(rs, theta, ratio, sigma)]
    text = report.csv_string(["r", "density", "density_over_exp_Qr",
                              "sphere_mean_curvature"], rows)
    _emit(args, text)
    if args.plot:
        report.render_volume_figure(rs, ratio, sigma, sp.Q, args.plot)
    return 0


def cmd_busemann(args):
    sp = _space_from_args(args)
    d = _parse_dir(sp, args.dir)
    p = _parse_point(sp, args.point) if args.point else sp.identity()
    bnd = busemann.boundary_coords(sp, d)
    ev = busemann.BusemannEvaluator(sp, bnd)
    if args.action == "eval":
        val = ev.value(p)
        lines = [f"busemann value = {val:.12e}"]
        if args.oracle:
            oracle = busemann.busemann_limit_oracle(sp, p, d, args.oracle)
            lines.append(f"limit oracle (T = {args.oracle:g}) = {oracle:.12e}")
            lines.append(f"deviation = {abs(val - oracle):.6e}")
        _emit(args, "\n".join(lines) + "\n")
        return 0
    if args.action == "grad":
        g = ev.gradient(p)
        _emit(args, "gradient = " + " ".join(f"{x:.12e}" for x in g)
              + f"\n|gradient| = {np.linalg.norm(g):.12f}\n")
        return 0
    H = ev.hessian(p)
    header = [f"e{i}" for i in range(sp.n)]
    rows = [[float(x) for x in row] for row in H]
    _emit(args, report.csv_string(header, rows))
    return 0


def cmd_spectrum(args):
    sp = _space_from_args(args)
    if not args.sweep and not args.dir:
        raise ValueError("spectrum needs --dir or --sweep")
    if args.sweep:
        rng = np.random.default_rng(args.seed)
        dirs = random_unit_directions(sp, args.sweep, rng, generic=True)
        rows = []
        for d in dirs:
            lam = spectral.identity_hessian_spectrum(sp, d)
            assembled = spectral.block_spectrum(sp, d)
            rows.append([*(float(x) for x in d), float(lam[0]), float(lam[-1]),
                         float(np.max(np.abs(lam - assembled)))])
        header = [f"dir{i}" for i in range(sp.n)] + [
            "min_eig", "max_eig", "block_union_residual"]
        _emit(args, report.csv_string(header, rows))
        return 0
    d = _parse_dir(sp, args.dir)
    V, Y, _ = sp.split(d)
    lines = []
    if np.linalg.norm(V) < 1e-12 or np.linalg.norm(Y) < 1e-12:
        rep = spectral.nongeneric_spectrum(sp, d)
        for lam, basis in rep["pairs"]:
            lines.append(f"eigenvalue {lam:.6f}  multiplicity {basis.shape[1]}")
        lines.append(f"eigenvector residual = {rep['eigenvector_residual']:.3e}")
    else:
        dec = spectral.admissible_decomposition(sp, d)
        lines.append(
            f"blocks: dim s4 = 4, dim p = {dec.dim_p}, k1 = {dec.k1}, "
            f"k2 = {dec.k2}")
        lines.append("mu values: " + " ".join(f"{mu:.9f}" for mu in dec.mus))
        lam = spectral.identity_hessian_spectrum(sp, d)
        lines.append("hessian eigenvalues on direction-perp: "
                     + " ".join(f"{x:.9f}" for x in lam))
        assembled = spectral.block_spectrum(sp, d)
        lines.append(f"block union residual = "
                     f"{np.max(np.abs(lam - assembled)):.3e}")
        comm = spectral.commutation_check(sp, d)
        lines.append(f"commutation residual = {comm['commutator']:.3e}, "
                     f"eigenvalue constancy = {comm['eigenvalue_constancy']:.3e}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_rank(args):
    sp = _space_from_args(args)
    rng = np.random.default_rng(args.seed)
    dirs = random_unit_directions(sp, args.sweep, rng)
    rows = []
    for d in dirs:
        rep = riccati.rank_of_geodesic(sp, d, tol=args.tol_zero, ts=(0.0,))
        rows.append([*(float(x) for x in d), rep.rank,
                     float(rep.spectral_floor)])
    header = [f"dir{i}" for i in range(sp.n)] + ["rank", "spectral_floor"]
    _emit(args, report.csv_string(header, rows))
    return 0


def cmd_riccati(args):
    sp = _space_from_args(args)
    d = _parse_dir(sp, args.dir)
    t0, t1 = args.tspan
    ts = np.linspace(t0, t1, max(int(round((t1 - t0) / max(args.dt, 1e-3))), 2))
    residuals = [riccati.riccati_residual(sp, d, float(t), dt=args.dt)
                 for t in ts]
    rows = [(float(t), float(r)) for t, r in zip(ts, residuals)]
    _emit(args, report.csv_string(["t", "riccati_residual"], rows))
    if args.plot:
        report.render_riccati_figure(ts, residuals, args.plot)
    return 0


def cmd_visibility(args):
    sp = _space_from_args(args)
    theta_dir = _parse_dir(sp, args.theta_dir)
    theta = busemann.boundary_coords(sp, theta_dir)
    p0 = _parse_point(sp, args.probe_point) if args.probe_point else sp.identity()
    u = _parse_dir(sp, args.probe_dir)
    probe = visibility.make_probe(sp, theta, p0, u)
    t0 = -args.horizon / 2.0
    step = 1e-2
    npts = int(round(args.horizon / step)) + 1
    ts = t0 + step * np.arange(npts)
    data = visibility.probe_samples(sp, theta, probe, ts)
    cum = visibility._cumulative_simpson(data["q_second"], step)
    rows = [(float(t), float(q), float(qp), float(qs), float(c))
            for t, q, qp, qs, c in zip(ts, data["q"], data["q_prime"],
                                       data["q_second"], cum)]
    _emit(args, report.csv_string(["t", "q", "q_prime", "q_second",
                                   "cumulative_integral"], rows))
    if args.plot:
        report.render_visibility_figure(ts, data["q"], data["q_prime"],
                                        data["q_second"], args.plot)
    return 0


def cmd_verify(args):
    instances = None
    if args.spec or args.preset != "all":
        if args.spec:
            instances = {"instance": load_spec(args.spec)}
        else:
            instances = {args.preset.partition("=")[0]: parse_preset(args.preset)}
    cfg = verify.RunConfig(seed=args.seed, quick=args.quick,
                           tolerances=_parse_tols(args.tol),
                           instances=instances)
    rows, ok = verify.run_verify_all(cfg)
    _emit(args, report.format_check_rows(rows, args.format))
    if args.plot:
        report.render_check_figure(rows, args.plot)
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="drspace",
        description="Damek-Ricci space numerical toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("space", help="build/inspect/check an instance")
    p.add_argument("action", choices=["info", "build", "check"])
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_space)

    p = sub.add_parser("geodesic", help="evaluate the closed-form geodesic")
    p.add_argument("action", choices=["eval"])
    p.add_argument("--dir", nargs="+", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--oracle", action="store_true",
                   help="compare with the RK4 integrator")
    p.add_argument("--step", type=float, default=1e-3)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("volume", help="geodesic-sphere volume density table")
    p.add_argument("--rmin", type=float, default=0.1)
    p.add_argument("--rmax", type=float, default=40.0)
    p.add_argument("--samples", type=int, default=200)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_volume)

    p = sub.add_parser("busemann", help="Busemann value/gradient/Hessian")
    p.add_argument("action", choices=["eval", "grad", "hess"])
    p.add_argument("--dir", nargs="+", required=True)
    p.add_argument("--point", nargs="+", default=None,
                   help="U X a components; defaults to the identity")
    p.add_argument("--oracle", type=float, default=None, metavar="T")
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_busemann)

    p = sub.add_parser("spectrum", help="direction-adapted Hessian spectrum")
    p.add_argument("--dir", nargs="+")
    p.add_argument("--sweep", type=int, default=0)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("rank", help="rank-one sweep")
    p.add_argument("--sweep", type=int, default=100)
    p.add_argument("--tol-zero", type=float, default=1e-6)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("riccati", help="Riccati residual along a geodesic")
    p.add_argument("--dir", nargs="+", required=True)
    p.add_argument("--tspan", nargs=2, type=float, default=(-2.0, 2.0))
    p.add_argument("--dt", type=float, default=1e-3)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_riccati)

    p = sub.add_parser("visibility", help="transverse-probe diagnostics")
    p.add_argument("--theta-dir", nargs="+", required=True)
    p.add_argument("--probe-dir", nargs="+", required=True)
    p.add_argument("--probe-point", nargs="+", default=None)
    p.add_argument("--horizon", type=float, default=50.0)
    _add_instance_args(p)
    _add_common_args(p)
    p.set_defaults(fn=cmd_visibility)

    p = sub.add_parser("verify", help="run every named check")
    p.add_argument("--quick", action="store_true",
                   help="reduced sample counts")
    p.add_argument("--preset", default="all")
    p.add_argument("--spec", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", action="append", default=[])
    p.add_argument("--format", choices=["text", "csv", "json-lines"],
                   default="text")
    p.add_argument("--out", default=None)
    p.add_argument("--plot", default=None)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliffordValidationError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return 1
    except (OSError, IOError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
