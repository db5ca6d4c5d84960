"""Numerical visibility-axiom criteria along transverse geodesic probes.

Fix an ideal point theta and a unit-speed probe geodesic gamma_1 that does
not represent theta or its antipode.  Writing q(t) = b_theta(gamma_1(t)),
the convexity data are

    q'(t)  = <grad b_theta, gamma_1'(t)> = cos phi(t),
    q''(t) = Hess b_theta (gamma_1', gamma_1') > 0,

and the integral criterion asks for a finite T with the integral of q''
over [t0, T] reaching 1.  Since the integral telescopes to
cos phi(T) - cos phi(t0), the start t0 has to sit early enough on the
probe that cos phi(t0) <= 0; the sweep helpers below default to a start
deep in the past of the probe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import busemann, geodesics, spectral

__all__ = [
    "TransverseGeodesicProbe", "probe_samples", "visibility_integral",
    "find_T_reaching_one", "least_eigenvalue_divergence",
    "busemann_divergence_probe", "gronwall_check",
]

TRANSVERSALITY_TOL = 1e-6


@dataclass(frozen=True)
class TransverseGeodesicProbe:
    """Probe geodesic gamma_1(t) = p0 * exp_e(t u), transverse to theta."""

    p0: object       # GroupPoint
    u: np.ndarray    # unit frame direction at p0


def make_probe(space, theta, p0, u):
    """Validate transversality: u must not be within 1e-6 of +-grad b."""
    p0 = space.as_point(p0)
    u = space.as_vector(u)
    u = u / np.linalg.norm(u)
    grad = busemann.BusemannEvaluator(space, theta).gradient(p0)
    if min(np.linalg.norm(u - grad), np.linalg.norm(u + grad)) < TRANSVERSALITY_TOL:
        raise ValueError("probe direction is asymptotic to theta (not transverse)")
    return TransverseGeodesicProbe(p0=p0, u=u)


def probe_points(space, probe, ts):
    """Batched probe points gamma_1(t) = p0 * exp_e(t u) as (U, X, a) arrays."""
    ts = np.asarray(ts, dtype=float)
    U, X, a = geodesics.geodesic_point_arrays(space, probe.u, ts)
    p0 = probe.p0
    return space.multiply_arrays(p0.U, p0.X, p0.a, U, X, a)


def probe_samples(space, theta, probe, ts, want_hessian=True):
    """q, q' and q'' along the probe (vectorized over the time grid).

    Left-invariance lets the probe velocity keep the frame components of
    exp_e(t u)' at every point.
    """
    ts = np.asarray(ts, dtype=float)
    evaluator = busemann.BusemannEvaluator(space, theta)
    U, X, a = probe_points(space, probe, ts)
    vel = geodesics.geodesic_velocity_arrays(space, probe.u, ts)
    q = evaluator.value_arrays(U, X, a)
    grad = evaluator.gradient_arrays(U, X, a)
    qp = np.sum(grad * vel, axis=-1)
    out = {"t": ts, "q": q, "q_prime": qp, "gradient": grad}
    if want_hessian:
        H = evaluator.hessian_arrays(U, X, a)
        out["q_second"] = np.einsum("...ij,...i,...j->...", H, vel, vel)
        out["hessian"] = H
    return out


def _cumulative_simpson(y, dx):
    """Cumulative composite-Simpson integral on a uniform grid.

    Even-index nodes get the classical composite rule; odd-index nodes
    append a half-panel correction by quadratic interpolation.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    out = np.zeros(n)
    if n < 2:
        return out
    if n == 2:
        out[1] = 0.5 * dx * (y[0] + y[1])
        return out
    # first half-panel by the parabola through the first three nodes
    out[1] = dx * (5.0 * y[0] + 8.0 * y[1] - y[2]) / 12.0
    for i in range(2, n):
        out[i] = out[i - 2] + (dx / 3.0) * (y[i - 2] + 4.0 * y[i - 1] + y[i])
    return out


def visibility_integral(space, theta, probe, t, T, step=1e-2):
    """Composite-Simpson integral of Hess b(gamma_1', gamma_1') over [t, T]."""
    n = max(int(np.ceil((T - t) / step)), 2)
    if n % 2:
        n += 1
    ts = np.linspace(t, T, n + 1)
    data = probe_samples(space, theta, probe, ts)
    y = data["q_second"]
    dx = ts[1] - ts[0]
    return float(np.sum((dx / 3.0) * (y[0:-1:2] + 4.0 * y[1::2] + y[2::2])))


def find_T_reaching_one(space, theta, probe, t0=-25.0, horizon=50.0, step=1e-2):
    """Smallest grid T > t0 with the visibility integral >= 1.

    Returns (T, cumulative value at T); raises RuntimeError when the
    horizon is exhausted, which would falsify the visibility criterion.
    """
    n = max(int(np.ceil(horizon / step)), 2)
    ts = t0 + step * np.arange(n + 1)
    data = probe_samples(space, theta, probe, ts)
    cum = _cumulative_simpson(data["q_second"], step)
    idx = np.nonzero(cum >= 1.0)[0]
    if len(idx) == 0:
        raise RuntimeError(
            f"visibility integral stayed below 1 on [{t0}, {t0 + horizon}] "
            f"(max {cum.max():.6f})"
        )
    return float(ts[idx[0]]), float(cum[idx[0]])


def least_eigenvalue_divergence(space, theta, probe, t1, t_max, step=0.1):
    """Cumulative integral of the least Hessian eigenvalue along the probe.

    lambda(p) is the smallest eigenvalue of the Busemann Hessian restricted
    to the horosphere tangent space at gamma_1(s).  Returns the sample grid,
    lambda samples and the cumulative integral.
    """
    n = max(int(np.ceil((t_max - t1) / step)), 2)
    ts = np.linspace(t1, t_max, n + 1)
    data = probe_samples(space, theta, probe, ts)
    H = data["hessian"]
    grad = data["gradient"]
    lams = np.empty(len(ts))
    for i in range(len(ts)):
        basis = spectral._householder_complement(grad[i])
        lams[i] = np.linalg.eigvalsh(basis.T @ H[i] @ basis)[0]
    cum = _cumulative_simpson(lams, ts[1] - ts[0])
    return {"t": ts, "lambda": lams, "cumulative": cum}


def busemann_divergence_probe(space, theta, probe, T_grid):
    """b_theta along the probe at the grid times; diverges for transverse probes."""
    data = probe_samples(space, theta, probe, np.asarray(T_grid, dtype=float),
                         want_hessian=False)
    return data["q"]


def gronwall_check(space, theta, probe, t1, t_max, step=0.1, pairs=40, rng=None):
    """Verify (1+y(t))/(1-y(t)) >= (1+y(t1))/(1-y(t1)) exp(2 int lambda).

    Checks the bound on sampled pairs (t1, t) of grid points; returns the
    most negative slack (>= -tol means the bound holds).
    """
    div = least_eigenvalue_divergence(space, theta, probe, t1, t_max, step=step)
    ts, lams, cum = div["t"], div["lambda"], div["cumulative"]
    data = probe_samples(space, theta, probe, ts, want_hessian=False)
    y = data["q_prime"]
    if np.any(np.abs(y) >= 1.0):
        raise ValueError("probe is asymptotic: |cos phi| reached 1")
    ratio = (1.0 + y) / (1.0 - y)
    if rng is None:
        rng = np.random.default_rng(0)
    n = len(ts)
    worst = np.inf
    for _ in range(pairs):
        i = int(rng.integers(0, n - 1))
        j = int(rng.integers(i + 1, n))
        bound = ratio[i] * np.exp(2.0 * (cum[j] - cum[i]))
        worst = min(worst, float(ratio[j] - bound))
    return {"worst_slack": worst, "ratio": ratio, "cumulative": cum}
