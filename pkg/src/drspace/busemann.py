"""Busemann functions on a Damek-Ricci space in closed form.

A unit direction V + Y + sA with s != 1 determines an ideal boundary
point through the chart

    v = (2/chi_inf) ((1-s) V + J_Y V),   y = (2/chi_inf) Y,
    chi_inf = (1-s)^2 + |Y|^2;

the direction A itself is the pole of the chart where the Busemann
function degenerates to -log a.  For fixed (v, y) the Busemann function is

    b(p) = log F(p) - log a + C,
    F = f^2 + |YY|^2,  f = a + |VV|^2/4,
    VV = v - U,  YY = y - X - (1/2)[U, v],
    C = -log((1 + |v|^2/4)^2 + |y|^2),

normalized so that b(e) = 0 for the geodesic through the identity.
Every evaluator here accepts batched point arrays; finite-difference
oracles for the gradient and the Hessian evaluate b along frame geodesics
through the base point, so no Christoffel correction enters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geodesics
from .algebra import bracket_v, j_map
from .space import GroupPoint

__all__ = [
    "IdealBoundaryPoint", "BusemannEvaluator", "boundary_coords",
    "busemann_value", "busemann_limit_oracle", "busemann_gradient",
    "hessian", "hessian_at_identity", "hessian_at_identity_batch",
    "hessian_pole", "fd_gradient", "fd_hessian", "identity_auxiliaries",
]

POLE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class IdealBoundaryPoint:
    """Chart coordinates (v, y) of an ideal point; pole marks the s = 1 ray."""

    v: np.ndarray
    y: np.ndarray
    pole: bool = False

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))


def boundary_coords(space, direction):
    """Ideal boundary point of the geodesic ray with the given unit direction."""
    w = space.as_vector(direction)
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    chi_inf = (1.0 - s) ** 2 + float(np.sum(Y * Y))
    if chi_inf < POLE_THRESHOLD:
        return IdealBoundaryPoint(np.zeros(space.m), np.zeros(space.k), pole=True)
    v = (2.0 / chi_inf) * ((1.0 - s) * V + j_map(space.algebra, Y, V))
    y = (2.0 / chi_inf) * Y
    return IdealBoundaryPoint(v, y, pole=False)


class BusemannEvaluator:
    """Closed-form Busemann function, gradient and Hessian for one ideal point."""

    def __init__(self, space, boundary: IdealBoundaryPoint):
        self.space = space
        self.boundary = boundary
        if not boundary.pole:
            v, y = boundary.v, boundary.y
            self.constant = -np.log((1.0 + 0.25 * np.sum(v * v)) ** 2 + np.sum(y * y))
        else:
            self.constant = 0.0

    # scratch maps ----------------------------------------------------------

    def _scratch(self, U, X, a):
        v, y = self.boundary.v, self.boundary.y
        VV = v - U
        YY = y - X - 0.5 * bracket_v(self.space.algebra, U, np.broadcast_to(v, U.shape))
        f = a + 0.25 * np.sum(VV * VV, axis=-1)
        F = f * f + np.sum(YY * YY, axis=-1)
        return VV, YY, f, F

    # value ------------------------------------------------------------------

    def value_arrays(self, U, X, a):
        U = np.asarray(U, dtype=float)
        X = np.asarray(X, dtype=float)
        a = np.asarray(a, dtype=float)
        if self.boundary.pole:
            return -np.log(a)
        _, _, _, F = self._scratch(U, X, a)
        return np.log(F) - np.log(a) + self.constant

    def value(self, p):
        p = self.space.as_point(p)
        return float(self.value_arrays(p.U, p.X, np.asarray(p.a)))

    # gradient ----------------------------------------------------------------

    def gradient_arrays(self, U, X, a):
        space = self.space
        U = np.asarray(U, dtype=float)
        X = np.asarray(X, dtype=float)
        a = np.asarray(a, dtype=float)
        batch = a.shape
        if self.boundary.pole:
            out = np.zeros(batch + (space.n,))
            out[..., -1] = -1.0
            return out
        VV, YY, f, F = self._scratch(U, X, a)
        ra = np.sqrt(a)
        jyyvv = j_map(space.algebra, YY, VV)
        gV = -ra[..., None] * (f[..., None] * VV - jyyvv) / F[..., None]
        gY = -2.0 * a[..., None] * YY / F[..., None]
        gA = (2.0 * a * f / F - 1.0)[..., None]
        return np.concatenate([gV, gY, gA], axis=-1)

    def gradient(self, p):
        p = self.space.as_point(p)
        return self.gradient_arrays(p.U, p.X, np.asarray(p.a))

    # Hessian ------------------------------------------------------------------

    def hessian_arrays(self, U, X, a):
        space = self.space
        U = np.asarray(U, dtype=float)
        X = np.asarray(X, dtype=float)
        a = np.asarray(a, dtype=float)
        if self.boundary.pole:
            return np.broadcast_to(hessian_pole(space), a.shape + (space.n, space.n)).copy()
        VV, YY, f, F = self._scratch(U, X, a)
        return _assemble_hessian(space, a, VV, YY, f, F)

    def hessian(self, p):
        p = self.space.as_point(p)
        return self.hessian_arrays(p.U, p.X, np.asarray(p.a))


def _assemble_hessian(space, a, VV, YY, f, F):
    """Frame components of the Hessian from the scratch maps at each point."""
    G = space.generators
    m, k, n = space.m, space.k, space.n
    a = np.asarray(a, dtype=float)
    batch = a.shape
    ra = np.sqrt(a)
    jyyvv = np.einsum("amn,...a,...n->...m", G, YY, VV)
    P = f[..., None] * VV - jyyvv

    H = np.zeros(batch + (n, n))
    # A-A
    H[..., -1, -1] = (2.0 * a / F**2) * (f * F + a * F - 2.0 * a * f * f)
    # A-V
    av = -(ra / (2.0 * F**2))[..., None] * (
        (f * F + 2.0 * a * F - 4.0 * a * f * f)[..., None] * VV
        + (4.0 * a * f - F)[..., None] * jyyvv
    )
    H[..., -1, :m] = av
    H[..., :m, -1] = av
    # A-Y
    ay = (2.0 * a * (2.0 * a * f - F) / F**2)[..., None] * YY
    H[..., -1, m : m + k] = ay
    H[..., m : m + k, -1] = ay
    # V-V
    T = np.einsum("amn,...n->...am", G, VV)  # rows J_alpha VV
    vv = (
        0.5 * np.eye(m)
        + (a / (2.0 * F))[..., None, None]
        * (np.einsum("...i,...j->...ij", VV, VV) + np.einsum("...am,...an->...mn", T, T))
        - (a / F**2)[..., None, None] * np.einsum("...i,...j->...ij", P, P)
    )
    H[..., :m, :m] = vv
    # V-Y
    W = (f - 2.0 * a)[..., None] * VV - jyyvv
    T2 = np.einsum("amn,...n->...ma", G, W)  # T2[..., i, alpha] = (J_alpha W)_i
    vy = (
        -(2.0 * a * ra / F**2)[..., None, None] * np.einsum("...i,...a->...ia", P, YY)
        + (ra / (2.0 * F))[..., None, None] * T2
    )
    H[..., :m, m : m + k] = vy
    H[..., m : m + k, :m] = np.swapaxes(vy, -1, -2)
    # Y-Y
    yy = ((F - 2.0 * a * f + 2.0 * a * a) / F)[..., None, None] * np.eye(k) - (
        4.0 * a * a / F**2
    )[..., None, None] * np.einsum("...a,...b->...ab", YY, YY)
    H[..., m : m + k, m : m + k] = yy
    return H


# ---------------------------------------------------------------------------
# module-level operations

def busemann_value(space, p, boundary):
    return BusemannEvaluator(space, boundary).value(p)


def busemann_gradient(space, p, boundary):
    return BusemannEvaluator(space, boundary).gradient(p)


def hessian(space, p, boundary):
    """Hessian of the Busemann function at p, as frame components (n x n)."""
    return BusemannEvaluator(space, boundary).hessian(p)


def busemann_limit_oracle(space, p, direction, T):
    """d(p, gamma(T)) - T: converges to the Busemann value as T grows."""
    p = space.as_point(p)
    q = geodesics.geodesic_point(space, direction, T)
    return geodesics.distance(space, p, q) - float(T)


def hessian_pole(space):
    """Hessian of b = -log a: (1/2) <,> on v, <,> on z, zero on the A line."""
    d = np.concatenate([
        np.full(space.m, 0.5), np.ones(space.k), np.zeros(1)
    ])
    return np.diag(d)


def identity_auxiliaries(space, direction):
    """Closed sub-expressions at the identity for a unit direction.

    Returns dict with chi_inf, f = 2(1-s)/chi_inf, F = 4/chi_inf, the
    combination f v - J_y v (which equals (4/chi_inf) V), and 4f - F.
    """
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    chi_inf = (1.0 - s) ** 2 + float(np.sum(Y * Y))
    bnd = boundary_coords(space, w)
    f = 2.0 * (1.0 - s) / chi_inf
    F = 4.0 / chi_inf
    fv_jyv = f * bnd.v - j_map(space.algebra, bnd.y, bnd.v)
    return {
        "chi_inf": chi_inf,
        "f": f,
        "F": F,
        "fv_minus_jyv": fv_jyv,
        "fv_minus_jyv_expected": (4.0 / chi_inf) * V,
        "four_f_minus_F": 4.0 * f - F,
        "four_f_minus_F_expected": 4.0 * (1.0 - 2.0 * s) / chi_inf,
    }


def hessian_at_identity(space, direction):
    """Hessian at e_S for the geodesic with the given unit direction."""
    return hessian_at_identity_batch(space, space.as_vector(direction)[None, :])[0]


def hessian_at_identity_batch(space, directions):
    """Vectorized Hessians at the identity for unit directions (B, n).

    Uses the closed identity-specialized scratch values f = 2(1-s)/chi_inf
    and F = 4/chi_inf; pole rows (s = 1) get the -log a Hessian.
    """
    directions = np.asarray(directions, dtype=float)
    V, Y, s = space.split(directions)
    s = s[..., 0]
    chi_inf = (1.0 - s) ** 2 + np.sum(Y * Y, axis=-1)
    pole = chi_inf < POLE_THRESHOLD
    chi_safe = np.where(pole, 1.0, chi_inf)
    v = (2.0 / chi_safe)[..., None] * ((1.0 - s)[..., None] * V + j_map(space.algebra, Y, V))
    y = (2.0 / chi_safe)[..., None] * Y
    f = 2.0 * (1.0 - s) / chi_safe
    F = 4.0 / chi_safe
    ones = np.ones_like(f)
    H = _assemble_hessian(space, ones, v, y, f, F)
    if np.any(pole):
        H[pole] = hessian_pole(space)
    return H


# ---------------------------------------------------------------------------
# finite-difference oracles

def fd_gradient(space, p, value_fn, h=1e-5):
    """Frame components of the differential of a scalar function at p.

    value_fn(U, X, a) -> values must accept batched point arrays.  The
    derivative along frame direction E_i is taken through the geodesic
    t -> p * exp_e(t E_i), so the result is exactly (E_i f)(p).
    """
    p = space.as_point(p)
    n = space.n
    dirs = np.eye(n)
    pts_plus, pts_minus = [], []
    for i in range(n):
        for sign, store in ((h, pts_plus), (-h, pts_minus)):
            U, X, a = geodesics.geodesic_point_arrays(space, dirs[i], sign)
            store.append((U, X, a))
    U1 = np.stack([q[0] for q in pts_plus])
    X1 = np.stack([q[1] for q in pts_plus])
    a1 = np.stack([np.asarray(q[2]) for q in pts_plus])
    U2 = np.stack([q[0] for q in pts_minus])
    X2 = np.stack([q[1] for q in pts_minus])
    a2 = np.stack([np.asarray(q[2]) for q in pts_minus])
    Up, Xp, ap = space.multiply_arrays(p.U, p.X, p.a, U1, X1, a1)
    Um, Xm, am = space.multiply_arrays(p.U, p.X, p.a, U2, X2, a2)
    return (value_fn(Up, Xp, ap) - value_fn(Um, Xm, am)) / (2.0 * h)


def fd_hessian(space, p, value_fn, h=1e-3):
    """Covariant finite-difference Hessian of a scalar function at p.

    Diagonal entries are 5-point second differences of f along the frame
    geodesics through p; off-diagonal entries come from polarization along
    the diagonals (e_i +- e_j)/sqrt(2).
    """
    p = space.as_point(p)
    n = space.n
    dirs = [np.eye(n)[i] for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        e = np.zeros(n)
        e[i] = e[j] = 1.0 / np.sqrt(2.0)
        dirs.append(e)
        e = np.zeros(n)
        e[i], e[j] = 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)
        dirs.append(e)
    dirs = np.asarray(dirs)
    taus = np.array([-2.0 * h, -h, h, 2.0 * h])

    Us, Xs, As = [], [], []
    for d in dirs:
        U, X, a = geodesics.geodesic_point_arrays(space, d, taus)
        Us.append(U)
        Xs.append(X)
        As.append(a)
    U = np.stack(Us)  # (D, 4, m)
    X = np.stack(Xs)
    a = np.stack(As)
    Up, Xp, ap = space.multiply_arrays(p.U, p.X, p.a, U, X, a)
    vals = value_fn(Up, Xp, ap)  # (D, 4)
    f0 = value_fn(p.U[None], p.X[None], np.asarray([p.a]))[0]
    # 5-point stencil: f(-2h), f(-h), f(0), f(h), f(2h)
    second = (-vals[:, 3] + 16.0 * vals[:, 2] - 30.0 * f0 + 16.0 * vals[:, 1] - vals[:, 0]) / (
        12.0 * h * h
    )
    H = np.zeros((n, n))
    for i in range(n):
        H[i, i] = second[i]
    for idx, (i, j) in enumerate(pairs):
        d_plus = second[n + 2 * idx]
        d_minus = second[n + 2 * idx + 1]
        H[i, j] = H[j, i] = 0.5 * (d_plus - d_minus)
    return H
