"""Horosphere shape operators, the Riccati equation, Jacobi tensors, and
rank diagnostics along geodesics.

The shape operator of the horosphere through gamma(t) centered at the
forward ideal point is S(t) = -(Hessian of the Busemann function) at
gamma(t), an operator on gamma'(t)^perp with spectrum in [-1, 0).  Along
the geodesic it satisfies the Riccati equation S' + S^2 + R = 0, where R
is the Jacobi operator of gamma'(t) and the derivative is covariant.  All
path computations happen in a parallel-transported orthonormal basis of
gamma'(0)^perp, obtained by integrating the frame-component transport
equation u' = -nabla_{gamma'(t)} u with the same fixed-step RK4 scheme
used by the geodesic oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import busemann, geodesics, spectral
from .algebra import j_map

__all__ = [
    "ShapeOperatorPath", "RankReport", "shape_operator", "riccati_residual",
    "riccati_integrate", "sphere_shape_operator", "rank_of_geodesic",
    "jacobi_kernel_locus", "flat_plane_candidate", "flat_plane_search",
    "estimate_uniform_floor", "transport_frame",
]

BLOWUP_NORM = 1e8


@dataclass(frozen=True)
class ShapeOperatorPath:
    """Shape operators along a geodesic, in a parallel-transported basis."""

    direction: np.ndarray
    times: np.ndarray
    frames: np.ndarray      # (T, n, n-1) parallel bases of gamma'(t)^perp
    operators: np.ndarray   # (T, n-1, n-1) symmetric components of S(t)


@dataclass(frozen=True)
class RankReport:
    direction: np.ndarray
    dim_zero_eigenspace: int
    rank: int
    counts_by_time: dict
    spectral_floor: float


def transport_frame(space, direction, t_grid, step=1e-3):
    """Parallel transport the Householder basis of direction^perp along gamma.

    Returns an array (len(t_grid), n, n-1); t_grid must be sorted and may
    contain negative times (transport runs separately backward/forward
    from 0 with fixed-step RK4).
    """
    w = space.as_vector(direction)
    basis0 = spectral._householder_complement(w)
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty((len(t_grid), space.n, space.n - 1))

    def rhs(t, E):
        vel = geodesics.geodesic_velocity(space, w, t)
        return -space.nabla(np.broadcast_to(vel, (E.shape[1], space.n)), E.T).T

    for sign in (-1.0, 1.0):
        sel = np.where(np.sign(t_grid) == sign)[0] if sign < 0 else np.where(t_grid >= 0)[0]
        if len(sel) == 0:
            continue
        targets = t_grid[sel]
        order = np.argsort(np.abs(targets))
        E = basis0.copy()
        t = 0.0
        for pos in order:
            target = targets[pos]
            span = target - t
            n_steps = max(int(round(abs(span) / step)), 1) if span != 0 else 0
            dt = span / n_steps if n_steps else 0.0
            for _ in range(n_steps):
                k1 = rhs(t, E)
                k2 = rhs(t + 0.5 * dt, E + 0.5 * dt * k1)
                k3 = rhs(t + 0.5 * dt, E + 0.5 * dt * k2)
                k4 = rhs(t + dt, E + dt * k3)
                E = E + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += dt
            out[sel[pos]] = E
    return out


def shape_operator(space, direction, t):
    """S(t) = -(Busemann Hessian at gamma(t)) as full frame components.

    The matrix annihilates gamma'(t) (the gradient direction); restricted
    to gamma'(t)^perp it is the horosphere shape operator.
    """
    w = space.as_vector(direction)
    bnd = busemann.boundary_coords(space, w)
    p = geodesics.geodesic_point(space, w, t)
    return -busemann.hessian(space, p, bnd)


def _operators_on_frames(space, direction, ts, frames):
    w = space.as_vector(direction)
    bnd = busemann.boundary_coords(space, w)
    evaluator = busemann.BusemannEvaluator(space, bnd)
    U, X, a = geodesics.geodesic_point_arrays(space, w, np.asarray(ts, dtype=float))
    H = evaluator.hessian_arrays(U, X, a)
    return -np.einsum("tik,tij,tjl->tkl", frames, H, frames)


def riccati_residual(space, direction, t, dt=1e-3, transport_step=1e-3):
    """Max-abs residual of S' + S^2 + R at gamma(t).

    S' is a central difference of the transported components at spacing dt;
    the residual decays at second order in dt.
    """
    w = space.as_vector(direction)
    ts = np.array([t - dt, t, t + dt])
    frames = transport_frame(space, w, ts, step=transport_step)
    M = _operators_on_frames(space, w, ts, frames)
    Sdot = (M[2] - M[0]) / (2.0 * dt)
    vel = geodesics.geodesic_velocity(space, w, t)
    R = space.jacobi_matrix(vel)
    Rf = frames[1].T @ R @ frames[1]
    return float(np.max(np.abs(Sdot + M[1] @ M[1] + Rf)))


def riccati_integrate(space, S0, direction, t_span, dt=1e-3):
    """Integrate S' = -S^2 - R(t) with RK4 in the parallel frame.

    S0 gives the components at t_span[0] on the transported basis of
    gamma'(t)^perp.  Norm blow-up beyond 1e8 aborts with a diagnostic.
    Returns a ShapeOperatorPath sampled at every integration node.
    """
    w = space.as_vector(direction)
    t0, t1 = float(t_span[0]), float(t_span[1])
    n_steps = max(int(round(abs(t1 - t0) / dt)), 1)
    h = (t1 - t0) / n_steps
    times = t0 + h * np.arange(n_steps + 1)
    frames = transport_frame(space, w, times, step=min(dt, 1e-3))

    def rf(i):
        vel = geodesics.geodesic_velocity(space, w, times[i])
        R = space.jacobi_matrix(vel)
        return frames[i].T @ R @ frames[i]

    # Jacobi components at half steps for the RK4 stages
    half_times = times[:-1] + 0.5 * h
    half_frames = transport_frame(space, w, half_times, step=min(dt, 1e-3))

    def rf_half(i):
        vel = geodesics.geodesic_velocity(space, w, half_times[i])
        R = space.jacobi_matrix(vel)
        return half_frames[i].T @ R @ half_frames[i]

    M = np.asarray(S0, dtype=float).copy()
    ops = [M.copy()]
    for i in range(n_steps):
        R0 = rf(i)
        Rh = rf_half(i)
        R1 = rf(i + 1)
        k1 = -(M @ M) - R0
        M2 = M + 0.5 * h * k1
        k2 = -(M2 @ M2) - Rh
        M3 = M + 0.5 * h * k2
        k3 = -(M3 @ M3) - Rh
        M4 = M + h * k3
        k4 = -(M4 @ M4) - R1
        M = M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(M)) or np.max(np.abs(M)) > BLOWUP_NORM:
            raise RuntimeError(
                f"Riccati blow-up at t = {times[i + 1]:.6g}: "
                f"operator norm exceeded {BLOWUP_NORM:.1e}"
            )
        ops.append(M.copy())
    return ShapeOperatorPath(
        direction=w, times=times, frames=frames, operators=np.asarray(ops)
    )


def analytic_path(space, direction, times, transport_step=1e-3):
    """Shape-operator components from the closed-form Hessian along gamma."""
    w = space.as_vector(direction)
    times = np.asarray(times, dtype=float)
    frames = transport_frame(space, w, times, step=transport_step)
    return ShapeOperatorPath(
        direction=w,
        times=times,
        frames=frames,
        operators=_operators_on_frames(space, w, times, frames),
    )


def sphere_shape_operator(space, direction, t, T, step=1e-3):
    """Shape operator of the geodesic sphere centered at gamma(T) at gamma(t).

    Integrates the Jacobi-tensor equation C'' + R C = 0 backward from the
    center (C = 0, slope -I there) in the parallel frame and forms the
    sign convention matching the horosphere operator: S_sph = C' C^{-1}.
    Converges to the horosphere shape operator as T grows.  Raises if the
    Jacobi tensor degenerates (t too close to the center).
    """
    if not t < T:
        raise ValueError("need t < T (the sphere center lies ahead of gamma(t))")
    w = space.as_vector(direction)
    n_steps = max(int(round((T - t) / step)), 2)
    h = -(T - t) / n_steps  # integrate backward in geodesic time
    times = T + h * np.arange(n_steps + 1)
    frames = transport_frame(space, w, times, step=step)
    d = space.n - 1

    def components(t, frame):
        vel = geodesics.geodesic_velocity(space, w, t)
        R = space.jacobi_matrix(vel)
        return frame.T @ R @ frame

    half_times = times[:-1] + 0.5 * h
    half_frames = transport_frame(space, w, half_times, step=step)

    C = np.zeros((d, d))
    D = -np.eye(d)  # dC/dx at the center; x is geodesic time
    for i in range(n_steps):
        R0 = components(times[i], frames[i])
        Rh = components(half_times[i], half_frames[i])
        R1 = components(times[i + 1], frames[i + 1])
        k1c, k1d = D, -R0 @ C
        C2, D2 = C + 0.5 * h * k1c, D + 0.5 * h * k1d
        k2c, k2d = D2, -Rh @ C2
        C3, D3 = C + 0.5 * h * k2c, D + 0.5 * h * k2d
        k3c, k3d = D3, -Rh @ C3
        C4, D4 = C + h * k3c, D + h * k3d
        k4c, k4d = D4, -R1 @ C4
        C = C + (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        D = D + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    sv = np.linalg.svd(C, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise ValueError("Jacobi tensor is singular: t too close to the center")
    S_sph = D @ np.linalg.inv(C)
    S_horo = frames[-1].T @ shape_operator(space, w, t) @ frames[-1]
    return {
        "sphere": S_sph,
        "horosphere": S_horo,
        "deviation": float(np.max(np.abs(S_sph - S_horo))),
        "min_singular_value": float(sv[-1]),
    }


# ---------------------------------------------------------------------------
# rank and kernel diagnostics

def rank_of_geodesic(space, direction, tol=1e-6, ts=(-2.0, 0.0, 2.0)):
    """rank(gamma) = 1 + dim of the Hessian zero-eigenspace on grad^perp.

    The zero-eigenspace dimension is checked at several times along the
    geodesic; for a Damek-Ricci space it is 0 everywhere, so the rank is 1.
    """
    w = space.as_vector(direction)
    bnd = busemann.boundary_coords(space, w)
    evaluator = busemann.BusemannEvaluator(space, bnd)
    counts = {}
    floor = np.inf
    for t in ts:
        p = geodesics.geodesic_point(space, w, t)
        H = evaluator.hessian(p)
        vel = geodesics.geodesic_velocity(space, w, t)
        basis = spectral._householder_complement(vel)
        lam = np.linalg.eigvalsh(basis.T @ H @ basis)
        counts[float(t)] = int(np.sum(lam < tol))
        floor = min(floor, float(lam.min()))
    dim0 = counts[0.0] if 0.0 in counts else counts[float(ts[0])]
    return RankReport(
        direction=w,
        dim_zero_eigenspace=dim0,
        rank=1 + dim0,
        counts_by_time=counts,
        spectral_floor=floor,
    )


def jacobi_kernel_locus(space, direction, tol=1e-9, t_grid=None):
    """Kernel dimension of the Jacobi operator and the h(t) obstruction.

    dim Ker R is 1 (the direction itself) except at directions with
    |V|^2 = 2/3, |Y|^2 = 1/3, s = 0 in an algebra where K^2 has eigenvalue
    0, where it is larger.  Even there the kernel is not parallel: h(t) < 1
    for t != 0, which is reported on the grid.
    """
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    lam = np.linalg.eigvalsh(space.jacobi_matrix(w))
    dim_kernel = int(np.sum(np.abs(lam) < tol))
    if t_grid is None:
        t_grid = np.concatenate([np.linspace(-10, -0.25, 40), np.linspace(0.25, 10, 40)])
    par = geodesics.params(space, w)
    h_vals = par.h(np.asarray(t_grid, dtype=float))
    at_locus = (
        abs(np.sum(V * V) - 2.0 / 3.0) < 1e-9
        and abs(np.sum(Y * Y) - 1.0 / 3.0) < 1e-9
        and abs(s) < 1e-9
    )
    return {
        "dim_kernel": dim_kernel,
        "eigenvalues": lam,
        "at_locus": at_locus,
        "max_h_off_zero": float(np.max(h_vals)),
        "h_below_one": bool(np.all(h_vals < 1.0)),
    }


def flat_plane_candidate(space, rng):
    """Configuration meeting the flat-plane conditions at t = 0 (needs k >= 2).

    Returns (direction, xi): direction = U1 + Y1 with |U1|^2 = 2/3 and
    |Y1|^2 = 1/3, and xi = U2 + Y2 the second plane vector, where
    U2 = J_{Y2} J_{Y1} U1 / |Y2|^2 enforces J_{Y1} U1 = -J_{Y2} U2.
    """
    if space.k < 2:
        raise ValueError("flat-plane configurations need k >= 2")
    alg = space.algebra
    y1 = rng.standard_normal(space.k)
    y1 /= np.linalg.norm(y1)
    y2 = rng.standard_normal(space.k)
    y2 -= y1 * (y1 @ y2)
    y2 /= np.linalg.norm(y2)
    u = rng.standard_normal(space.m)
    u /= np.linalg.norm(u)
    U1 = np.sqrt(2.0 / 3.0) * u
    Y1 = y1 / np.sqrt(3.0)
    Y2 = y2 / np.sqrt(3.0)
    U2 = j_map(alg, Y2, j_map(alg, Y1, U1)) / float(np.sum(Y2 * Y2))
    direction = space.join(U1, Y1, 0.0)
    xi = space.join(U2, Y2, 0.0)
    return direction, xi


def flat_plane_search(space, direction, xi, t_grid, transport_step=1e-3):
    """Track K(P(t)) for the parallel plane field P(t) = {gamma'(t), xi(t)}.

    For a candidate flat configuration, K(P(0)) = 0 but the A-component of
    the velocity, (log h)'(t), vanishes only at t = 0 and K(P(t)) < 0 away
    from it: no flat plane section field survives along the geodesic.
    """
    w = space.as_vector(direction)
    xi = space.as_vector(xi)
    t_grid = np.asarray(t_grid, dtype=float)
    # transport xi: reuse the frame transporter on a single column
    frames = transport_frame_single(space, w, t_grid, xi, step=transport_step)
    curvatures = np.empty(len(t_grid))
    log_h_prime = np.empty(len(t_grid))
    par = geodesics.params(space, w)
    for idx, t in enumerate(t_grid):
        vel = geodesics.geodesic_velocity(space, w, t)
        xi_t = frames[idx]
        _, curvatures[idx] = space.sectional_curvature(vel, xi_t)
        log_h_prime[idx] = par.log_h_prime(t)
    return {"times": t_grid, "K": curvatures, "log_h_prime": log_h_prime}


def transport_frame_single(space, direction, t_grid, vector, step=1e-3):
    """Parallel transport one frame vector along gamma to each grid time."""
    w = space.as_vector(direction)
    vec = space.as_vector(vector)
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty((len(t_grid), space.n))

    def rhs(t, u):
        vel = geodesics.geodesic_velocity(space, w, t)
        return -space.nabla(vel, u)

    for sign in (-1.0, 1.0):
        sel = np.where(np.sign(t_grid) == sign)[0] if sign < 0 else np.where(t_grid >= 0)[0]
        if len(sel) == 0:
            continue
        targets = t_grid[sel]
        order = np.argsort(np.abs(targets))
        u = vec.copy()
        t = 0.0
        for pos in order:
            target = targets[pos]
            span = target - t
            n_steps = max(int(round(abs(span) / step)), 1) if span != 0 else 0
            dt = span / n_steps if n_steps else 0.0
            for _ in range(n_steps):
                k1 = rhs(t, u)
                k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1)
                k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2)
                k4 = rhs(t + dt, u + dt * k3)
                u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += dt
            out[sel[pos]] = u
    return out


def estimate_uniform_floor(space, n_samples, rng):
    """Sampled lower bound for the Hessian on grad^perp over random directions."""
    from .space import random_unit_directions

    dirs = random_unit_directions(space, n_samples, rng)
    H = busemann.hessian_at_identity_batch(space, dirs)
    floor = np.inf
    # batched Householder restriction
    for i in range(n_samples):
        basis = spectral._householder_complement(dirs[i])
        lam = np.linalg.eigvalsh(basis.T @ H[i] @ basis)
        floor = min(floor, float(lam[0]))
    return floor
