"""Closed-form geodesics, an RK4 oracle, the distance function, and the
volume density of geodesic spheres.

Unit-speed geodesics through the identity are parameterized by a unit
direction V + Y + sA.  The scalar profile functions are

    theta(t) = tanh(t/2)
    chi(t)   = (1 - s theta)^2 + |Y|^2 theta^2
    h(t)     = (1 - theta^2) / chi(t)

and the geodesic point is
    U(t) = (2 theta (1 - s theta)/chi) V + (2 theta^2/chi) J_Y V,
    X(t) = (2 theta/chi) Y,
    a(t) = h(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import bracket_v, j_map
from .space import GroupPoint

__all__ = [
    "GeodesicParams", "geodesic_point", "geodesic_point_arrays",
    "geodesic_velocity", "geodesic_velocity_arrays", "geodesic_ode",
    "distance_from_identity", "distance", "distance_from_identity_arrays",
    "volume_density", "log_volume_density", "volume_growth_ratio",
]


def theta(t):
    return np.tanh(np.asarray(t, dtype=float) / 2.0)


def _sech2(t):
    """sech^2(t/2) = 1 - tanh^2(t/2) without cancellation for large |t|."""
    return 1.0 / np.cosh(np.asarray(t, dtype=float) / 2.0) ** 2


def _one_minus_s_theta(s, t):
    """1 - s tanh(t/2) in exponentially stable form.

    Written over u = exp(-|t|) so that no cancellation occurs near s = 1,
    t -> +inf (or s = -1, t -> -inf), where the direct expression loses
    all significant digits.
    """
    t = np.asarray(t, dtype=float)
    u = np.exp(-np.abs(t))
    pos = ((1.0 - s) + (1.0 + s) * u) / (1.0 + u)
    neg = ((1.0 + s) + (1.0 - s) * u) / (1.0 + u)
    return np.where(t >= 0, pos, neg)


@dataclass(frozen=True)
class GeodesicParams:
    """Scalar profile of the geodesic with the given unit direction."""

    s: float
    y_norm_sq: float

    def theta(self, t):
        return theta(t)

    def chi(self, t):
        th = theta(t)
        return _one_minus_s_theta(self.s, t) ** 2 + self.y_norm_sq * th * th

    def h(self, t):
        # 1 - theta^2 = sech^2(t/2), computed without cancellation
        return _sech2(t) / self.chi(t)

    def log_h_prime(self, t):
        """(log h)'(t); equals the A-component of the velocity."""
        th = theta(t)
        omst = _one_minus_s_theta(self.s, t)
        return -th - _sech2(t) * (self.y_norm_sq * th - self.s * omst) / self.chi(t)


def _check_unit(space, direction, tol=1e-9):
    w = space.as_vector(direction)
    if abs(np.linalg.norm(w) - 1.0) > tol:
        raise ValueError("direction must be a unit vector")
    return w


def params(space, direction):
    w = _check_unit(space, direction)
    _, Y, s = space.split(w)
    return GeodesicParams(s=float(s[..., 0]), y_norm_sq=float(np.sum(Y * Y)))


def geodesic_point_arrays(space, direction, t):
    """Geodesic point coordinates for an array of times; returns (U, X, a)."""
    w = _check_unit(space, direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    t = np.asarray(t, dtype=float)
    th = theta(t)
    omst = _one_minus_s_theta(s, t)
    chi = omst * omst + np.sum(Y * Y) * th * th
    jyv = j_map(space.algebra, Y, V)
    U = (2.0 * th * omst / chi)[..., None] * V + (2.0 * th * th / chi)[..., None] * jyv
    X = (2.0 * th / chi)[..., None] * Y
    a = _sech2(t) / chi
    return U, X, a


def geodesic_point(space, direction, t):
    """Point gamma(t) of the unit-speed geodesic from the identity."""
    U, X, a = geodesic_point_arrays(space, direction, float(t))
    return GroupPoint(U, X, float(a))


def geodesic_velocity_arrays(space, direction, t):
    """Frame components of gamma'(t) for an array of times; shape (..., n)."""
    w = _check_unit(space, direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    t = np.asarray(t, dtype=float)
    p = GeodesicParams(s=s, y_norm_sq=float(np.sum(Y * Y)))
    th = theta(t)
    omst = _one_minus_s_theta(s, t)
    chi = p.chi(t)
    h = p.h(t)
    rh = np.sqrt(h)
    jyv = j_map(space.algebra, Y, V)
    vpart = ((rh / chi) * (omst * omst - th * th * p.y_norm_sq))[..., None] * V \
        + (2.0 * (rh / chi) * th * omst)[..., None] * jyv
    ypart = h[..., None] * Y
    apart = np.asarray(p.log_h_prime(t), dtype=float)[..., None]
    return np.concatenate([vpart, ypart, apart], axis=-1)


def geodesic_velocity(space, direction, t):
    return geodesic_velocity_arrays(space, direction, float(t))


# ---------------------------------------------------------------------------
# independent RK4 oracle

def _ode_rhs(space, state):
    """First-order geodesic system in (v, y, lambda, w) coordinates.

    Positions evolve through the frame-to-coordinate relations; the frame
    components w of the velocity obey w' = -nabla_w w.
    """
    m, k = space.m, space.k
    v = state[..., :m]
    y = state[..., m : m + k]
    lam = state[..., m + k]
    w = state[..., m + k + 1 :]
    wV, wY, ws = space.split(w)
    a = np.exp(lam)
    ra = np.sqrt(a)
    dv = ra[..., None] * wV
    dy = a[..., None] * wY - 0.5 * ra[..., None] * bracket_v(space.algebra, wV, v)
    dlam = ws[..., 0]
    dwV = j_map(space.algebra, wY, wV) + 0.5 * ws * wV
    dwY = ws * wY
    dws = -0.5 * np.sum(wV * wV, axis=-1) - np.sum(wY * wY, axis=-1)
    return np.concatenate(
        [dv, dy, dlam[..., None], dwV, dwY, dws[..., None]], axis=-1
    )


def _rk4(space, state, t_final, step):
    n_steps = int(round(abs(t_final) / step))
    n_steps = max(n_steps, 1)
    dt = t_final / n_steps
    for _ in range(n_steps):
        k1 = _ode_rhs(space, state)
        k2 = _ode_rhs(space, state + 0.5 * dt * k1)
        k3 = _ode_rhs(space, state + 0.5 * dt * k2)
        k4 = _ode_rhs(space, state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def initial_state(space, direction):
    w = space.as_vector(direction)
    return np.concatenate([np.zeros(space.m + space.k + 1), w], axis=-1)


def integrate_states(space, states, t_final, step):
    """RK4-advance a batch of (position, velocity) states by time t_final."""
    return _rk4(space, np.asarray(states, dtype=float), t_final, step)


def state_to_point(space, state):
    m, k = space.m, space.k
    return GroupPoint(state[..., :m], state[..., m : m + k], np.exp(state[..., m + k]))


def state_velocity(space, state):
    return state[..., space.m + space.k + 1 :]


def geodesic_ode(space, direction, t, step=1e-3):
    """Integrate the geodesic ODE from the identity; independent of the
    closed form (uses only the connection and the coordinate frames)."""
    w = _check_unit(space, direction)
    if step <= 0:
        raise ValueError("step must be positive")
    if t == 0:
        return space.identity()
    state = _rk4(space, initial_state(space, w), float(t), step)
    return state_to_point(space, state)


def geodesic_ode_batch(space, directions, t, step=1e-3):
    """Vectorized oracle: integrate many directions at once to time t."""
    directions = np.asarray(directions, dtype=float)
    zeros = np.zeros(directions.shape[:-1] + (space.m + space.k + 1,))
    state = np.concatenate([zeros, directions], axis=-1)
    state = _rk4(space, state, float(t), step)
    m, k = space.m, space.k
    return state[..., :m], state[..., m : m + k], np.exp(state[..., m + k])


# ---------------------------------------------------------------------------
# distance

def _lambda_function(U, X, a):
    U = np.asarray(U, dtype=float)
    X = np.asarray(X, dtype=float)
    a = np.asarray(a, dtype=float)
    un2 = np.sum(U * U, axis=-1)
    xn2 = np.sum(X * X, axis=-1)
    return ((1.0 + a + 0.25 * un2) ** 2 + xn2) / a


def distance_from_identity_arrays(space, U, X, a, tol=1e-12):
    lam = _lambda_function(U, X, a)
    bad = lam < 4.0 - tol * np.maximum(1.0, np.abs(lam))
    if np.any(bad):
        raise ValueError(
            f"distance function out of range: lambda = {np.min(lam):.17g} < 4"
        )
    lam = np.maximum(lam, 4.0)
    return np.log((lam - 2.0 + np.sqrt(lam * lam - 4.0 * lam)) / 2.0)


def distance_from_identity(space, p, tol=1e-12):
    """d(e, p) = log((lam - 2 + sqrt(lam^2 - 4 lam))/2), lam = lam(p) >= 4."""
    p = space.as_point(p)
    return float(distance_from_identity_arrays(space, p.U, p.X, p.a, tol=tol))


def distance(space, p, q):
    """Left-invariant distance d(p, q) = d(e, p^{-1} q)."""
    p = space.as_point(p)
    q = space.as_point(q)
    return distance_from_identity(space, space.multiply(space.inverse(p), q))


# ---------------------------------------------------------------------------
# volume density of geodesic spheres

def log_volume_density(space, r):
    """log Theta(r) with the normalization Theta(r) ~ r^{n-1} as r -> 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("volume density requires r > 0")
    n1 = space.n - 1
    c3 = 2.0 * space.Q - n1
    return n1 * np.log(2.0 * np.sinh(r / 2.0)) + c3 * np.log(np.cosh(r / 2.0))


def volume_density(space, r):
    """(Theta(r), sigma(r)): density and mean curvature of the r-sphere."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("volume density requires r > 0")
    n1 = space.n - 1
    c3 = 2.0 * space.Q - n1
    th = np.exp(log_volume_density(space, r))
    sigma = 0.5 * n1 / np.tanh(r / 2.0) + 0.5 * c3 * np.tanh(r / 2.0)
    return th, sigma


def volume_growth_ratio(space, r):
    """Theta(r) e^{-Q r}, computed in log space for stability."""
    return np.exp(log_volume_density(space, r) - space.Q * np.asarray(r, dtype=float))


def hypergeometric_exponents(space):
    """(2 c2, 2 c3) in Theta = c1 sinh^{2 c2}(r/2) cosh^{2 c3}(r/2)."""
    return space.n - 1, 2.0 * space.Q - (space.n - 1)
