"""Named verification checks: every acceptance criterion as a runnable check.

Each check returns rows (check id, detail, residual, tolerance, pass) so
reports stay diffable; `run_verify_all` executes the registry over the
four catalog presets plus an auxiliary anisotropic instance whose K^2
spectrum sweeps the open interval (-1, 0), which the catalog cannot reach.
Random draws use a PCG64 generator seeded per check from the run seed, so
a fixed seed reproduces reports byte for byte.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import busemann, geodesics, riccati, spectral, visibility
from .algebra import (
    CliffordModuleSpec,
    _quaternionic_generators,
    build_algebra,
    sample_identity_residuals,
)
from .space import (
    DamekRicciSpace,
    plane_basis_no_a_batch,
    random_unit_directions,
    sectional_closed_form_batch,
)

PRESET_ORDER = ("heisenberg", "quaternionic", "htype_k2", "cayley")

DEFAULT_TOLERANCES = {
    "htype_axioms": 1e-12,
    "geodesic_oracle": 1e-8,
    "distance_geodesic": 1e-10,
    "busemann_limit": 1e-6,
    "hessian_fd": 1e-5,
    "hessian_identity": 1e-12,
    "gradient_fd": 1e-6,
    "gradient_norm": 1e-10,
    "block_cross": 1e-10,
    "block_minors": 1e-10,
    "spectrum_union": 1e-9,
    "cubic_roots": 1e-9,
    "cubic_locus": 1e-12,
    "rank_floor": 0.01,
    "rank_zero_tol": 1e-6,
    "riccati_residual": 1e-6,
    "riccati_fixed_point": 1e-10,
    "riccati_order_low": 12.0,
    "riccati_order_high": 20.0,
    "commutation": 1e-8,
    "curvature_closed_form": 1e-10,
    "curvature_nonpositive": 1e-12,
    "einstein_spread": 1e-10,
    "volume_sigma": 1e-8,
    "visibility_horizon": 50.0,
    "gronwall_slack": 1e-4,
    "equivariance": 1e-10,
    "convexity": 1e-10,
}

FULL_COUNTS = {
    "axiom_samples": 1000,
    "oracle_dirs": 50,
    "distance_samples": 200,
    "busemann_samples": 50,
    "hessian_fd_samples": 25,   # per preset; 100 across the catalog
    "block_dirs": 10,
    "rank_dirs": 500,
    "planes": 10000,
    "probes": 100,
}

QUICK_COUNTS = {
    "axiom_samples": 200,
    "oracle_dirs": 4,
    "distance_samples": 40,
    "busemann_samples": 10,
    "hessian_fd_samples": 4,
    "block_dirs": 3,
    "rank_dirs": 50,
    "planes": 1000,
    "probes": 6,
}


def anisotropic_instance():
    """k = 3, m = 8 instance with direction-dependent K^2 spectrum.

    Two quaternionic blocks with the third generator flipped on the second
    block: a valid H-type algebra whose K^2 eigenvalue sweeps (-1, 0] as
    the direction moves, unlike the catalog instances where it is 0 or -1.
    """
    gens = _quaternionic_generators(2)
    gens[2][4:, 4:] *= -1.0
    return CliffordModuleSpec(m=8, k=3, generators=gens)


@dataclass
class RunConfig:
    seed: int = 0
    quick: bool = False
    tolerances: dict = field(default_factory=dict)
    instances: dict = None  # name -> CliffordModuleSpec; None = full suite set

    def tol(self, name):
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def count(self, name):
        base = QUICK_COUNTS if self.quick else FULL_COUNTS
        return base[name]


@dataclass
class CheckResult:
    check_id: str
    detail: str
    residual: float
    tol: float
    passed: bool
    elapsed: float = 0.0


class Context:
    def __init__(self, config: RunConfig):
        self.config = config
        if config.instances is None:
            from .algebra import standard_instance

            instances = {
                "heisenberg": standard_instance("heisenberg_q", 1),
                "quaternionic": standard_instance("quaternionic_q", 1),
                "htype_k2": standard_instance("htype_k2"),
                "cayley": standard_instance("cayley"),
                "anisotropic": anisotropic_instance(),
            }
        else:
            instances = dict(config.instances)
        self.spaces = {
            name: DamekRicciSpace(build_algebra(spec))
            for name, spec in instances.items()
        }

    def presets(self):
        ordered = [n for n in PRESET_ORDER if n in self.spaces]
        extras = sorted(n for n in self.spaces
                        if n not in PRESET_ORDER and n != "anisotropic")
        return ordered + extras

    def rng(self, check_id):
        return np.random.default_rng(
            [self.config.seed, zlib.crc32(check_id.encode())]
        )


def _row(check_id, detail, residual, tol, passed=None, elapsed=0.0):
    if passed is None:
        passed = bool(residual < tol)
    return CheckResult(check_id, detail, float(residual), float(tol),
                       bool(passed), elapsed)


# ---------------------------------------------------------------------------
# criterion 1: H-type axioms

def check_htype_axioms(ctx):
    rows = []
    tol = ctx.config.tol("htype_axioms")
    n = ctx.config.count("axiom_samples")
    for name in ctx.presets():
        t0 = time.time()
        sp = ctx.spaces[name]
        res = sample_identity_residuals(sp.algebra, ctx.rng(f"axioms.{name}"), n)
        worst = max(res.values())
        rows.append(
            _row(f"htype_axioms[{name}]", f"{n} samples, 6 identities", worst, tol,
                 elapsed=time.time() - t0)
        )
    return rows


# criterion 2: geodesic closed form vs ODE oracle

def check_geodesic_oracle(ctx):
    rows = []
    tol = ctx.config.tol("geodesic_oracle")
    n_dirs = ctx.config.count("oracle_dirs")
    step = 1e-3
    for name in ctx.presets():
        t0 = time.time()
        sp = ctx.spaces[name]
        dirs = random_unit_directions(sp, n_dirs, ctx.rng(f"geodesic.{name}"))
        worst = 0.0
        for sign in (1.0, -1.0):
            state = np.concatenate(
                [np.zeros((n_dirs, sp.m + sp.k + 1)), dirs], axis=-1
            )
            t = 0.0
            for _ in range(20):
                state = geodesics.integrate_states(sp, state, sign * 0.25, step)
                t += sign * 0.25
                # closed form for every direction at this checkpoint
                th = np.tanh(t / 2.0)
                V = dirs[:, : sp.m]
                Y = dirs[:, sp.m : sp.m + sp.k]
                s = dirs[:, -1]
                chi = (1.0 - s * th) ** 2 + np.sum(Y * Y, axis=1) * th * th
                jyv = np.einsum("amn,ba,bn->bm", sp.generators, Y, V)
                Uc = (2 * th * (1 - s * th) / chi)[:, None] * V + (2 * th * th / chi)[:, None] * jyv
                Xc = (2 * th / chi)[:, None] * Y
                ac = (1.0 / np.cosh(t / 2.0) ** 2) / chi
                m, k = sp.m, sp.k
                err = max(
                    np.max(np.abs(state[:, :m] - Uc)),
                    np.max(np.abs(state[:, m : m + k] - Xc)),
                    np.max(np.abs(np.exp(state[:, m + k]) - ac)),
                )
                worst = max(worst, float(err))
        rows.append(
            _row(f"geodesic_oracle[{name}]",
                 f"{n_dirs} directions, |t|<=5, RK4 step {step:g}", worst, tol,
                 elapsed=time.time() - t0)
        )
    return rows


# criterion 3: distance along geodesics

def check_distance(ctx):
    rows = []
    tol = ctx.config.tol("distance_geodesic")
    n = ctx.config.count("distance_samples")
    for name in ctx.presets():
        t0 = time.time()
        sp = ctx.spaces[name]
        rng = ctx.rng(f"distance.{name}")
        dirs = random_unit_directions(sp, n, rng)
        ts = rng.uniform(-5.0, 5.0, n)
        worst = 0.0
        for d, t in zip(dirs, ts):
            U, X, a = geodesics.geodesic_point_arrays(sp, d, float(t))
            dist = geodesics.distance_from_identity_arrays(sp, U, X, a)
            worst = max(worst, abs(float(dist) - abs(t)))
        # vertical ray: exact log
        rs = rng.uniform(0.1, 10.0, 16)
        for r in rs:
            U = np.zeros(sp.m)
            X = np.zeros(sp.k)
            dist = float(geodesics.distance_from_identity_arrays(sp, U, X, np.exp(r)))
            worst = max(worst, abs(dist - r))
        rows.append(
            _row(f"distance_geodesic[{name}]", f"{n} random (direction, t)",
                 worst, tol, elapsed=time.time() - t0)
        )
    return rows


# criterion 4: Busemann closed form vs limit oracle

def check_busemann_limit(ctx):
    rows = []
    tol = ctx.config.tol("busemann_limit")
    n = ctx.config.count("busemann_samples")
    T = 30.0
    for name in ctx.presets():
        t0 = time.time()
        sp = ctx.spaces[name]
        rng = ctx.rng(f"busemann.{name}")
        worst = 0.0
        for _ in range(n):
            d = random_unit_directions(sp, 1, rng)[0]
            d2 = random_unit_directions(sp, 1, rng)[0]
            p = geodesics.geodesic_point(sp, d2, rng.uniform(-2, 2))
            bnd = busemann.boundary_coords(sp, d)
            closed = busemann.busemann_value(sp, p, bnd)
            oracle = busemann.busemann_limit_oracle(sp, p, d, T)
            worst = max(worst, abs(closed - oracle))
        # pole case: b = -log a
        d2 = random_unit_directions(sp, 1, rng)[0]
        p = geodesics.geodesic_point(sp, d2, 0.9)
        pole = busemann.IdealBoundaryPoint(np.zeros(sp.m), np.zeros(sp.k), pole=True)
        closed = busemann.busemann_value(sp, p, pole)
        oracle = busemann.busemann_limit_oracle(sp, p, sp.a_vector(), T)
        worst = max(worst, abs(closed - oracle))
        rows.append(
            _row(f"busemann_limit[{name}]", f"{n} samples, T = {T:g}", worst,
                 tol, elapsed=time.time() - t0)
        )
    return rows


# criterion 5: Hessian formulas vs covariant finite differences

def check_hessian_fd(ctx):
    rows = []
    tol = ctx.config.tol("hessian_fd")
    tol_id = ctx.config.tol("hessian_identity")
    n = ctx.config.count("hessian_fd_samples")
    for name in ctx.presets():
        t0 = time.time()
        sp = ctx.spaces[name]
        rng = ctx.rng(f"hessianfd.{name}")
        worst = 0.0
        worst_grad = 0.0
        for _ in range(n):
            d = random_unit_directions(sp, 1, rng)[0]
            d2 = random_unit_directions(sp, 1, rng)[0]
            p = geodesics.geodesic_point(sp, d2, rng.uniform(-1.5, 1.5))
            bnd = busemann.boundary_coords(sp, d)
            ev = busemann.BusemannEvaluator(sp, bnd)
            H = ev.hessian(p)
            fd = busemann.fd_hessian(sp, p, ev.value_arrays)
            worst = max(worst, float(np.max(np.abs(H - fd))))
            g = ev.gradient(p)
            gfd = busemann.fd_gradient(sp, p, ev.value_arrays)
            worst_grad = max(worst_grad, float(np.max(np.abs(g - gfd))))
        rows.append(
            _row(f"hessian_fd[{name}]", f"{n} random (p, boundary)", worst, tol,
                 elapsed=time.time() - t0)
        )
        rows.append(
            _row(f"gradient_fd[{name}]", f"{n} random (p, boundary)", worst_grad,
                 ctx.config.tol("gradient_fd"))
        )
        # identity formulas equal the general formulas at e_S
        dirs = random_unit_directions(sp, 64, rng)
        Hb = busemann.hessian_at_identity_batch(sp, dirs)
        worst_id = 0.0
        for i, d in enumerate(dirs):
            bnd = busemann.boundary_coords(sp, d)
            He = busemann.BusemannEvaluator(sp, bnd).hessian(sp.identity())
            worst_id = max(worst_id, float(np.max(np.abs(Hb[i] - He))))
        rows.append(
            _row(f"hessian_identity[{name}]", "identity vs general formulas",
                 worst_id, tol_id)
        )
    return rows


# criterion 6: block spectra

def check_blocks(ctx):
    rows = []
    tol = ctx.config.tol("block_cross")
    tol_minor = ctx.config.tol("block_minors")
    tol_union = ctx.config.tol("spectrum_union")
    n_dirs = ctx.config.count("block_dirs")
    names = ctx.presets() + (["anisotropic"] if "anisotropic" in ctx.spaces else [])
    for name in names:
        sp = ctx.spaces[name]
        rng = ctx.rng(f"blocks.{name}")
        t0 = time.time()
        worst_cross = worst_s4 = worst_p = worst_union = 0.0
        worst_qell = worst_q0 = worst_minor = 0.0
        positive = True
        for _ in range(n_dirs):
            d = random_unit_directions(sp, 1, rng, generic=True)[0]
            rep = spectral.hessian_blocks(sp, d)
            worst_cross = max(worst_cross, rep["cross_block"],
                              rep["bracket_containment"])
            worst_p = max(worst_p, rep["p_block_half_identity"])
            s4 = spectral.s4_block(sp, d)
            worst_s4 = max(worst_s4, s4["hessian_residual"], s4["null_residual"])
            dec = spectral.admissible_decomposition(sp, d)
            for qb in dec.qblocks:
                if abs(qb.mu + 1.0) <= 1e-8:
                    qe = spectral.q_ell_block(sp, d)
                    for pair in qe["pairs"]:
                        worst_qell = max(worst_qell, pair["matrix_residual"],
                                         pair["eigenvalue_residual"],
                                         pair["eigenvector_residual"])
                elif abs(qb.mu) <= 1e-8:
                    q0 = spectral.q0_block(sp, d)
                    worst_q0 = max(worst_q0, q0["entry_residual"],
                                   q0["completed_square_residual"])
                    positive = positive and q0["min_eigenvalue"] > 0
                else:
                    j = dec.qblocks.index(qb)
                    qj = spectral.q_j_hermitian(sp, d, j)
                    worst_minor = max(
                        worst_minor,
                        abs(qj["det2"] - qj["det2_formula"]),
                        abs(qj["det3"] - qj["det3_formula"]),
                        qj["entry_residual"],
                    )
                    positive = positive and qj["min_operator_eigenvalue"] > 0 \
                        and qj["det2"] > 0 and qj["det3"] > 0
            direct = spectral.identity_hessian_spectrum(sp, d)
            assembled = spectral.block_spectrum(sp, d)
            worst_union = max(worst_union, float(np.max(np.abs(direct - assembled))))
        elapsed = time.time() - t0
        rows.append(_row(f"block_cross[{name}]",
                         f"{n_dirs} generic directions", worst_cross, tol,
                         elapsed=elapsed))
        rows.append(_row(f"block_s4[{name}]", "adapted-basis table {1,1/2,1/2}",
                         worst_s4, tol))
        rows.append(_row(f"block_p[{name}]", "p block = I/2", worst_p, tol))
        if worst_qell or name in ("heisenberg",):
            rows.append(_row(f"block_q_ell[{name}]", "eigenvalues {1, 1/2}",
                             worst_qell, tol))
        if name == "htype_k2":
            rows.append(_row(f"block_q0[{name}]",
                             "entry table and completed squares", worst_q0,
                             tol_minor, passed=worst_q0 < tol_minor and positive))
        if name == "anisotropic":
            rows.append(_row(f"block_qj_minors[{name}]",
                             "Hermitian minors vs closed forms", worst_minor,
                             tol_minor,
                             passed=worst_minor < tol_minor and positive))
        rows.append(_row(f"spectrum_union[{name}]",
                         "block union vs direct eigensolve", worst_union,
                         tol_union))
    return rows


# criterion 7: Jacobi cubic

def check_cubic(ctx):
    rows = []
    tol = ctx.config.tol("cubic_roots")
    tol_locus = ctx.config.tol("cubic_locus")
    names = [n for n in ctx.presets() if n != "heisenberg"]
    if "anisotropic" in ctx.spaces:
        names.append("anisotropic")
    n_dirs = ctx.config.count("block_dirs")
    for name in names:
        sp = ctx.spaces[name]
        rng = ctx.rng(f"cubic.{name}")
        t0 = time.time()
        worst = 0.0
        bounds_ok = True
        for _ in range(n_dirs):
            d = random_unit_directions(sp, 1, rng, generic=True)[0]
            dec = spectral.admissible_decomposition(sp, d)
            for qb in dec.qblocks:
                roots = spectral.jacobi_cubic(sp, d, qb.mu)
                eigs = np.sort(spectral.jacobi_block_eigenvalues(sp, d, qb))
                if abs(qb.mu + 1.0) <= 1e-8:
                    k1 = qb.zbasis.shape[1]
                    expect = np.sort(np.concatenate(
                        [np.full(k1, -1.0), np.full(k1, -0.25)]))
                else:
                    expect = np.sort(np.tile(roots, qb.basis.shape[1] // 3))
                    bounds_ok = bounds_ok and (
                        -1.0 < roots[0] <= -0.75 + 1e-12
                        and -0.75 - 1e-12 <= roots[1] < -0.25
                        and -0.25 < roots[2] <= 1e-12
                    )
                worst = max(worst, float(np.max(np.abs(eigs - expect))))
        rows.append(_row(f"jacobi_cubic[{name}]",
                         f"roots vs eigensolve, {n_dirs} directions", worst,
                         tol, passed=worst < tol and bounds_ok,
                         elapsed=time.time() - t0))
    if "htype_k2" in ctx.spaces:
        sp = ctx.spaces["htype_k2"]
        V = np.zeros(sp.m)
        V[0] = np.sqrt(2.0 / 3.0)
        Y = np.zeros(sp.k)
        Y[0] = 1.0 / np.sqrt(3.0)
        d = sp.join(V, Y, 0.0)
        roots = spectral.jacobi_cubic(sp, d, 0.0)
        rows.append(_row("jacobi_cubic_locus[htype_k2]",
                         "kappa3 = 0 at |V|^2 = 2/3, |Y|^2 = 1/3",
                         abs(roots[-1]), tol_locus))
    return rows


# criterion 8: rank one

def check_rank(ctx):
    rows = []
    floor_tol = ctx.config.tol("rank_floor")
    zero_tol = ctx.config.tol("rank_zero_tol")
    n_dirs = ctx.config.count("rank_dirs")
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rng = ctx.rng(f"rank.{name}")
        t0 = time.time()
        dirs = random_unit_directions(sp, n_dirs, rng)
        H = busemann.hessian_at_identity_batch(sp, dirs)
        floor = np.inf
        for i in range(n_dirs):
            basis = spectral._householder_complement(dirs[i])
            lam = np.linalg.eigvalsh(basis.T @ H[i] @ basis)
            floor = min(floor, float(lam[0]))
        all_rank_one = floor > zero_tol
        rows.append(_row(f"rank_one[{name}]",
                         f"{n_dirs} directions, floor {floor:.4f}",
                         0.0 if floor >= floor_tol else floor_tol - floor,
                         floor_tol,
                         passed=all_rank_one and floor >= floor_tol,
                         elapsed=time.time() - t0))
        # rank count stability along the geodesic for a few directions
        sub = dirs[:3]
        stable = True
        for d in sub:
            repd = riccati.rank_of_geodesic(sp, d, tol=zero_tol)
            stable = stable and len(set(repd.counts_by_time.values())) == 1 \
                and repd.rank == 1
        rows.append(_row(f"rank_t_independent[{name}]",
                         "dim E constant at t in {-2, 0, 2}", 0.0, 1.0,
                         passed=stable))
    if "htype_k2" in ctx.spaces:
        sp = ctx.spaces["htype_k2"]
        V = np.zeros(sp.m)
        V[0] = np.sqrt(2.0 / 3.0)
        Y = np.zeros(sp.k)
        Y[0] = 1.0 / np.sqrt(3.0)
        d = sp.join(V, Y, 0.0)
        rep = riccati.jacobi_kernel_locus(sp, d)
        H = busemann.hessian_at_identity(sp, d)
        basis = spectral._householder_complement(d)
        hfloor = float(np.min(np.linalg.eigvalsh(basis.T @ H @ basis)))
        ok = rep["dim_kernel"] == 2 and hfloor > floor_tol and rep["h_below_one"]
        rows.append(_row("rank_locus[htype_k2]",
                         f"dim Ker R = {rep['dim_kernel']}, Hessian floor "
                         f"{hfloor:.4f}, h(t) < 1", 0.0, 1.0, passed=ok))
        # same norms in the quaternionic instance: kernel stays 1-dim
        if "quaternionic" in ctx.spaces:
            spq = ctx.spaces["quaternionic"]
            V = np.zeros(spq.m)
            V[0] = np.sqrt(2.0 / 3.0)
            Y = np.zeros(spq.k)
            Y[0] = 1.0 / np.sqrt(3.0)
            repq = riccati.jacobi_kernel_locus(spq, spq.join(V, Y, 0.0))
            rows.append(_row("rank_locus[quaternionic]",
                             f"dim Ker R = {repq['dim_kernel']} (no mu = 0)",
                             0.0, 1.0, passed=repq["dim_kernel"] == 1))
    return rows


# criterion 9: Riccati equation and commutation

def check_riccati(ctx):
    rows = []
    tol = ctx.config.tol("riccati_residual")
    tol_fp = ctx.config.tol("riccati_fixed_point")
    tol_comm = ctx.config.tol("commutation")
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rng = ctx.rng(f"riccati.{name}")
        t0 = time.time()
        d = random_unit_directions(sp, 1, rng, generic=True)[0]
        res = riccati.riccati_residual(sp, d, 0.7, dt=1e-3)
        rows.append(_row(f"riccati_residual[{name}]",
                         "generic direction, dt = 1e-3", res, tol,
                         elapsed=time.time() - t0))
        comm = spectral.commutation_check(sp, d)
        worst = max(comm["commutator"], comm["eigenvalue_constancy"],
                    comm["pairing_residual"], comm["invariance"])
        rows.append(_row(f"riccati_commutation[{name}]",
                         "[S, R] = 0 on f with paired spectrum", worst,
                         tol_comm))
    # direction-A fixed point: S' = 0 and S^2 + R = 0
    sp = ctx.spaces[ctx.presets()[0]]
    A = sp.a_vector()
    S0 = riccati.shape_operator(sp, A, 0.0)
    S1 = riccati.shape_operator(sp, A, 0.5)
    R = sp.jacobi_matrix(A)
    fp = max(float(np.max(np.abs(S0 - S1))),
             float(np.max(np.abs(S0 @ S0 + R))))
    rows.append(_row("riccati_fixed_point[A]",
                     "S constant with S^2 + R = 0", fp, tol_fp))
    # second-order convergence of the residual estimator where S' != 0
    if "htype_k2" in ctx.spaces:
        sp = ctx.spaces["htype_k2"]
        d = random_unit_directions(sp, 1, ctx.rng("riccati.order"), generic=True)[0]
        r_coarse = riccati.riccati_residual(sp, d, 0.7, dt=4e-3)
        r_fine = riccati.riccati_residual(sp, d, 0.7, dt=1e-3)
        ratio = r_coarse / max(r_fine, 1e-300)
        lo = ctx.config.tol("riccati_order_low")
        hi = ctx.config.tol("riccati_order_high")
        rows.append(_row("riccati_order[htype_k2]",
                         f"residual ratio dt 4e-3 / 1e-3 = {ratio:.2f}",
                         0.0, 1.0, passed=lo <= ratio <= hi))
        # integration consistency and sphere-to-horosphere convergence
        path = riccati.riccati_integrate(
            sp, riccati.analytic_path(sp, d, [-1.0]).operators[0], d,
            (-1.0, 1.0), dt=1e-2)
        ana = riccati.analytic_path(sp, d, path.times[-1:])
        int_res = float(np.max(np.abs(path.operators[-1] - ana.operators[0])))
        rows.append(_row("riccati_integrate[htype_k2]",
                         "RK4 path vs closed-form operators", int_res, tol))
        devs = [riccati.sphere_shape_operator(sp, d, 1.0, T, step=5e-3)["deviation"]
                for T in (5.0, 10.0, 20.0)]
        rows.append(_row("sphere_to_horosphere[htype_k2]",
                         f"deviations {devs[0]:.2e} > {devs[1]:.2e} > {devs[2]:.2e}",
                         0.0, 1.0,
                         passed=devs[0] > devs[1] > devs[2]))
    return rows


# criterion 10: curvature

def check_curvature(ctx):
    rows = []
    tol = ctx.config.tol("curvature_closed_form")
    tol_pos = ctx.config.tol("curvature_nonpositive")
    tol_ein = ctx.config.tol("einstein_spread")
    n_planes = ctx.config.count("planes")
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rng = ctx.rng(f"curvature.{name}")
        t0 = time.time()
        u = rng.standard_normal((n_planes, sp.n))
        v = rng.standard_normal((n_planes, sp.n))
        e1, e2 = plane_basis_no_a_batch(u, v)
        closed = sectional_closed_form_batch(sp, e1, e2)
        n2 = sp.n * sp.n
        Rm2 = sp.curvature_tensor.reshape(n2, n2)
        w12 = np.einsum("bi,bj->bij", e1, e2).reshape(-1, n2)
        w21 = np.einsum("bi,bj->bij", e2, e1).reshape(-1, n2)
        direct = np.einsum("bi,bi->b", w12 @ Rm2, w21)
        worst = float(np.max(np.abs(closed - direct)))
        max_k = float(np.max(direct))
        rows.append(_row(f"curvature_closed_form[{name}]",
                         f"{n_planes} random planes", worst, tol,
                         elapsed=time.time() - t0))
        rows.append(_row(f"curvature_nonpositive[{name}]", "max K(P)",
                         max(max_k, 0.0), tol_pos, passed=max_k <= tol_pos))
        # four-term non-positive decomposition on shaped planes
        nb = min(n_planes, 2000)
        ab = rng.standard_normal((nb, 2))
        ab /= np.linalg.norm(ab, axis=1, keepdims=True)
        n1 = rng.standard_normal((nb, sp.m + sp.k))
        n1 /= np.linalg.norm(n1, axis=1, keepdims=True)
        w2 = rng.standard_normal((nb, sp.m + sp.k))
        w2 -= n1 * np.sum(w2 * n1, axis=1, keepdims=True)
        w2 /= np.linalg.norm(w2, axis=1, keepdims=True)
        U1, Y1 = n1[:, : sp.m], n1[:, sp.m :]
        U2, Y2 = w2[:, : sp.m], w2[:, sp.m :]
        a_, b_ = ab[:, 0], ab[:, 1]
        x1 = np.concatenate([b_[:, None] * n1, a_[:, None]], axis=1)
        x2 = np.concatenate([w2, np.zeros((nb, 1))], axis=1)
        kdir = np.einsum("bi,bi->b",
                         np.einsum("bi,bj->bij", x1, x2).reshape(-1, n2) @ Rm2,
                         np.einsum("bi,bj->bij", x2, x1).reshape(-1, n2))
        from .algebra import bracket_v, j_map

        br = bracket_v(sp.algebra, U1, U2)
        t1 = -0.25 * a_**2
        t2 = -0.75 * np.sum((a_[:, None] * Y2 + b_[:, None] * br) ** 2, axis=1)
        t3 = -0.75 * b_**2 * np.sum(Y1 * Y2, axis=1) ** 2
        tp = (np.sum(Y1 * Y1, axis=1) * np.sum(Y2 * Y2, axis=1)
              + 2.0 * np.sum(j_map(sp.algebra, Y1, U1) * j_map(sp.algebra, Y2, U2), axis=1)
              + 1.0 / 3.0)
        t4 = -0.75 * b_**2 * tp
        worst_dec = float(np.max(np.abs(kdir - (t1 + t2 + t3 + t4))))
        terms_nonpos = bool(np.all(tp > -1e-12))
        rows.append(_row(f"curvature_four_terms[{name}]",
                         f"{nb} shaped planes, term-by-term", worst_dec, tol,
                         passed=worst_dec < tol and terms_nonpos))
        c, spread = sp.einstein_constant()
        rows.append(_row(f"einstein[{name}]", f"Ricci = ({c:.6g}) I", spread,
                         tol_ein))
    return rows


# criterion 11: volume growth

def check_volume(ctx):
    rows = []
    tol_sigma = ctx.config.tol("volume_sigma")
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rs = np.linspace(1.0, 40.0, 400)
        ratio = geodesics.volume_growth_ratio(sp, rs)
        lo, hi = float(ratio.min()), float(ratio.max())
        _, sigma30 = geodesics.volume_density(sp, 30.0)
        c2x2, c3x2 = geodesics.hypergeometric_exponents(sp)
        exponents_ok = (c2x2 == sp.n - 1) and (c3x2 == 2 * sp.Q - (sp.n - 1))
        ok = lo > 0 and np.isfinite(hi) and exponents_ok
        rows.append(_row(f"volume_growth[{name}]",
                         f"ratio in [{lo:.4g}, {hi:.4g}] on [1, 40]",
                         0.0, 1.0, passed=ok))
        rows.append(_row(f"volume_sigma[{name}]", "sigma(30) vs Q",
                         abs(float(sigma30) - sp.Q), tol_sigma))
    return rows


# criterion 12: visibility

def check_visibility(ctx):
    rows = []
    horizon = ctx.config.tol("visibility_horizon")
    slack_tol = ctx.config.tol("gronwall_slack")
    n_probes = ctx.config.count("probes")
    step = 1e-2
    t0_grid = -horizon / 2.0
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rng = ctx.rng(f"visibility.{name}")
        t0 = time.time()
        found = 0
        max_T = -np.inf
        convex_ok = True
        gronwall_worst = 0.0
        npts = int(round(horizon / step)) + 1
        ts = t0_grid + step * np.arange(npts)
        sub = slice(0, npts, 10)   # coarse grid for eigenvalue work
        for _ in range(n_probes):
            d = random_unit_directions(sp, 1, rng)[0]
            theta = busemann.boundary_coords(sp, d)
            d2 = random_unit_directions(sp, 1, rng)[0]
            p0 = geodesics.geodesic_point(sp, d2, rng.uniform(-1, 1))
            u = random_unit_directions(sp, 1, rng)[0]
            try:
                probe = visibility.make_probe(sp, theta, p0, u)
            except ValueError:
                continue
            data = visibility.probe_samples(sp, theta, probe, ts)
            cum = visibility._cumulative_simpson(data["q_second"], step)
            idx = np.nonzero(cum >= 1.0)[0]
            if len(idx):
                found += 1
                max_T = max(max_T, float(ts[idx[0]]))
            q = data["q"]
            imin = int(np.argmin(q))
            convex_ok = convex_ok and np.all(data["q_second"] > 0)
            if 0 < imin < len(q) - 1:
                convex_ok = convex_ok and np.all(np.diff(q[imin:]) > 0) \
                    and np.all(np.diff(q[: imin + 1]) < 0)
            # Gronwall on the coarse grid
            H = data["hessian"][sub]
            grad = data["gradient"][sub]
            y = data["q_prime"][sub]
            lams = np.empty(len(y))
            for i in range(len(y)):
                basis = spectral._householder_complement(grad[i])
                lams[i] = np.linalg.eigvalsh(basis.T @ H[i] @ basis)[0]
            cums = visibility._cumulative_simpson(lams, step * 10)
            ratio = (1.0 + y) / (1.0 - y)
            ii = rng.integers(0, len(y) - 1, 24)
            jj = ii + 1 + rng.integers(0, len(y) - 1 - ii)
            bound = ratio[ii] * np.exp(2.0 * (cums[jj] - cums[ii]))
            slack = (bound - ratio[jj]) / np.maximum(bound, 1e-12)
            gronwall_worst = max(gronwall_worst, float(np.max(slack)))
        detail = f"{found}/{n_probes} probes reach 1 (max T {max_T:.2f})"
        rows.append(_row(f"visibility_T[{name}]", detail, 0.0, 1.0,
                         passed=found == n_probes, elapsed=time.time() - t0))
        rows.append(_row(f"visibility_convexity[{name}]",
                         "q'' > 0 with a single minimum", 0.0, 1.0,
                         passed=convex_ok))
        rows.append(_row(f"gronwall[{name}]", "angle bound at sample pairs",
                         gronwall_worst, slack_tol))
    return rows


# group/busemann structural invariants (module suite)

def check_structural(ctx):
    rows = []
    for name in ctx.presets():
        sp = ctx.spaces[name]
        rng = ctx.rng(f"structural.{name}")
        n = 100
        # group associativity and inverses
        def rand_points(count):
            d = random_unit_directions(sp, count, rng)
            ts = rng.uniform(-2, 2, count)
            out = []
            for i in range(count):
                out.append(geodesics.geodesic_point(sp, d[i], ts[i]))
            return out

        worst = 0.0
        pts = rand_points(n)
        for p, q, r in zip(pts[::3], pts[1::3], pts[2::3]):
            lhs = sp.multiply(sp.multiply(p, q), r)
            rhs = sp.multiply(p, sp.multiply(q, r))
            worst = max(worst,
                        float(np.max(np.abs(lhs.U - rhs.U))),
                        float(np.max(np.abs(lhs.X - rhs.X))),
                        abs(lhs.a - rhs.a))
            inv = sp.multiply(sp.inverse(p), p)
            worst = max(worst, float(np.max(np.abs(inv.U))),
                        float(np.max(np.abs(inv.X))), abs(inv.a - 1.0))
        rows.append(_row(f"group_law[{name}]",
                         "associativity and inverses", worst, 1e-12))
        # torsion, metric compatibility, curvature symmetries
        x = rng.standard_normal((200, sp.n))
        y = rng.standard_normal((200, sp.n))
        z = rng.standard_normal((200, sp.n))
        tors = sp.nabla(x, y) - sp.nabla(y, x) - sp.bracket(x, y)
        mc = np.einsum("bi,bi->b", sp.nabla(x, y), z) + np.einsum(
            "bi,bi->b", y, sp.nabla(x, z))
        Rm = sp.curvature_tensor
        sym = max(
            float(np.max(np.abs(Rm + np.swapaxes(Rm, 0, 1)))),
            float(np.max(np.abs(Rm - np.transpose(Rm, (2, 3, 0, 1))))),
            float(np.max(np.abs(Rm + np.transpose(Rm, (1, 2, 0, 3))
                                + np.transpose(Rm, (2, 0, 1, 3))))),
        )
        worst = max(float(np.max(np.abs(tors))), float(np.max(np.abs(mc))), sym)
        rows.append(_row(f"connection_curvature[{name}]",
                         "torsion, compatibility, symmetries", worst, 1e-10))
        # gradient unit norm + translation equivariance of the Hessian
        worst_g = 0.0
        worst_eq = 0.0
        for _ in range(10):
            d = random_unit_directions(sp, 1, rng)[0]
            bnd = busemann.boundary_coords(sp, d)
            ev = busemann.BusemannEvaluator(sp, bnd)
            d2 = random_unit_directions(sp, 1, rng)[0]
            p = geodesics.geodesic_point(sp, d2, rng.uniform(-2, 2))
            g = ev.gradient(p)
            worst_g = max(worst_g, abs(float(np.linalg.norm(g)) - 1.0))
            x = geodesics.geodesic_point(
                sp, random_unit_directions(sp, 1, rng)[0], rng.uniform(-1, 1))
            xinvU, xinvX, xinva = sp.inverse(x).U, sp.inverse(x).X, sp.inverse(x).a

            def translated(U, Xx, a):
                U2, X2, a2 = sp.multiply_arrays(xinvU, xinvX, xinva, U, Xx, a)
                return ev.value_arrays(U2, X2, a2)

            xp = sp.multiply(x, p)
            fdH = busemann.fd_hessian(sp, xp, translated)
            worst_eq = max(worst_eq, float(np.max(np.abs(fdH - ev.hessian(p)))))
        rows.append(_row(f"gradient_norm[{name}]", "unit gradient field",
                         worst_g, ctx.config.tol("gradient_norm")))
        rows.append(_row(f"equivariance[{name}]",
                         "Hessian pulled back by left translation",
                         worst_eq, ctx.config.tol("hessian_fd")))
        # convexity along random geodesics
        worst_cv = 0.0
        for _ in range(20):
            d = random_unit_directions(sp, 1, rng)[0]
            bnd = busemann.boundary_coords(sp, d)
            probe_dir = random_unit_directions(sp, 1, rng)[0]
            p0 = geodesics.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0],
                                          rng.uniform(-1, 1))
            try:
                probe = visibility.make_probe(sp, bnd, p0, probe_dir)
            except ValueError:
                continue
            data = visibility.probe_samples(sp, bnd, probe,
                                            np.linspace(-3, 3, 61))
            worst_cv = max(worst_cv, float(-np.min(data["q_second"])))
        rows.append(_row(f"convexity[{name}]",
                         "second derivative along geodesics >= 0",
                         max(worst_cv, 0.0), ctx.config.tol("convexity"),
                         passed=worst_cv < ctx.config.tol("convexity")))
    return rows


CHECKS = [
    ("htype_axioms", check_htype_axioms),
    ("structural", check_structural),
    ("geodesic_oracle", check_geodesic_oracle),
    ("distance", check_distance),
    ("busemann_limit", check_busemann_limit),
    ("hessian_fd", check_hessian_fd),
    ("blocks", check_blocks),
    ("cubic", check_cubic),
    ("rank", check_rank),
    ("riccati", check_riccati),
    ("curvature", check_curvature),
    ("volume", check_volume),
    ("visibility", check_visibility),
]


def run_verify_all(config: RunConfig):
    """Run the complete registry; returns (rows, all_passed)."""
    ctx = Context(config)
    rows = []
    for _, fn in CHECKS:
        rows.extend(fn(ctx))
    return rows, all(r.passed for r in rows)
