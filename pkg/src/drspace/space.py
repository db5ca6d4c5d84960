"""The solvable extension S = N x R_+ with its left-invariant metric.

Conventions used throughout the package:

* Algebra/tangent vectors are length-n arrays in the left-invariant
  orthonormal frame, ordered [v-part (m), z-part (k), A-part (1)].
* Group points are (U, X, a) with U in R^m, X in R^k and a > 0 the
  multiplicative coordinate (a = e^lambda); the identity is (0, 0, 1).
* All tensors (connection, curvature) are evaluated in the left-invariant
  frame where they are point-independent; point dependence enters only
  through the frame-to-coordinate change of basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import HeisenbergAlgebra, bracket_v, j_map


@dataclass(frozen=True)
class GroupPoint:
    """Point of S in the upper-half-space model: (U, X, a) with a > 0."""

    U: np.ndarray
    X: np.ndarray
    a: float

    def __post_init__(self):
        object.__setattr__(self, "U", np.asarray(self.U, dtype=float))
        object.__setattr__(self, "X", np.asarray(self.X, dtype=float))
        object.__setattr__(self, "a", float(self.a))
        if not self.a > 0:
            raise ValueError(f"a-coordinate must be positive, got {self.a}")


@dataclass(frozen=True)
class AlgebraVector:
    """Tangent/algebra element (V, Y, s) in the left-invariant frame."""

    V: np.ndarray
    Y: np.ndarray
    s: float

    def __post_init__(self):
        object.__setattr__(self, "V", np.asarray(self.V, dtype=float))
        object.__setattr__(self, "Y", np.asarray(self.Y, dtype=float))
        object.__setattr__(self, "s", float(self.s))

    def to_array(self):
        return np.concatenate([self.V, self.Y, [self.s]])

    def norm(self):
        return float(np.linalg.norm(self.to_array()))


class DamekRicciSpace:
    """Damek-Ricci space S built on a validated H-type algebra.

    Exposes the Lie bracket on s = v + z + a, the group law, the
    Levi-Civita connection, and the curvature machinery (curvature tensor,
    Jacobi operators, sectional curvature, Ricci).
    """

    def __init__(self, algebra: HeisenbergAlgebra):
        self.algebra = algebra
        self.m = algebra.m
        self.k = algebra.k
        self.n = self.m + self.k + 1
        self.Q = self.m / 2.0 + self.k
        self.generators = algebra.generators
        self._gamma = None
        self._rm = None

    # -- vector plumbing ----------------------------------------------------

    def split(self, x):
        """Split frame components into (V, Y, s); s keeps a trailing axis."""
        x = np.asarray(x, dtype=float)
        return x[..., : self.m], x[..., self.m : self.m + self.k], x[..., -1:]

    def join(self, V, Y, s):
        V = np.asarray(V, dtype=float)
        Y = np.asarray(Y, dtype=float)
        s = np.asarray(s, dtype=float)
        if s.ndim < max(V.ndim, Y.ndim, 1):
            s = s[..., None]
        batch = np.broadcast_shapes(V.shape[:-1], Y.shape[:-1], s.shape[:-1])
        V = np.broadcast_to(V, batch + (self.m,))
        Y = np.broadcast_to(Y, batch + (self.k,))
        s = np.broadcast_to(s, batch + (1,))
        return np.concatenate([V, Y, s], axis=-1)

    def from_v(self, V):
        return self.join(V, np.zeros(self.k), 0.0)

    def from_z(self, Y):
        return self.join(np.zeros(self.m), Y, 0.0)

    def a_vector(self):
        out = np.zeros(self.n)
        out[-1] = 1.0
        return out

    def as_vector(self, x):
        if isinstance(x, AlgebraVector):
            return x.to_array()
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected frame vector of length {self.n}, got {x.shape}")
        return x

    def as_point(self, p):
        if isinstance(p, GroupPoint):
            return p
        U, X, a = p
        return GroupPoint(U, X, a)

    def identity(self):
        return GroupPoint(np.zeros(self.m), np.zeros(self.k), 1.0)

    # -- algebra structure --------------------------------------------------

    def bracket(self, x, y):
        """Lie bracket on s; the A-component of the result is always 0."""
        x = self.as_vector(x)
        y = self.as_vector(y)
        V, Yx, s = self.split(x)
        U, Xy, r = self.split(y)
        vpart = 0.5 * s * U - 0.5 * r * V
        ypart = s * Xy - r * Yx + bracket_v(self.algebra, V, U)
        apart = np.zeros(vpart.shape[:-1] + (1,))
        return np.concatenate([vpart, ypart, apart], axis=-1)

    def nabla(self, x, y):
        """Levi-Civita connection on left-invariant fields (frame components)."""
        x = self.as_vector(x)
        y = self.as_vector(y)
        G = self.generators
        V, Yx, s = self.split(x)
        U, Xy, r = self.split(y)
        jxv = np.einsum("amn,...a,...n->...m", G, Xy, V)
        jyu = np.einsum("amn,...a,...n->...m", G, Yx, U)
        vpart = -0.5 * jxv - 0.5 * jyu - 0.5 * r * V
        ypart = -0.5 * bracket_v(self.algebra, U, V) - r * Yx
        apart = (0.5 * np.sum(U * V, axis=-1) + np.sum(Xy * Yx, axis=-1))[..., None]
        return np.concatenate([vpart, ypart, apart], axis=-1)

    @property
    def gamma(self):
        """Connection coefficients Gamma[i, j, k] = <nabla_{E_i} E_j, E_k>."""
        if self._gamma is None:
            n = self.n
            eye = np.eye(n)
            xs = np.repeat(eye, n, axis=0)
            ys = np.tile(eye, (n, 1))
            self._gamma = self.nabla(xs, ys).reshape(n, n, n)
        return self._gamma

    @property
    def curvature_tensor(self):
        """Rm[i, j, k, l] = <R(E_i, E_j) E_k, E_l> from the connection."""
        if self._rm is None:
            n = self.n
            G = self.gamma
            eye = np.eye(n)
            xs = np.repeat(eye, n, axis=0)
            ys = np.tile(eye, (n, 1))
            Bk = self.bracket(xs, ys).reshape(n, n, n)
            rm = (
                np.einsum("jkp,ipl->ijkl", G, G)
                - np.einsum("ikp,jpl->ijkl", G, G)
                - np.einsum("ijp,pkl->ijkl", Bk, G)
            )
            self._rm = rm
        return self._rm

    def curvature(self, u, v, w):
        """R(u, v)w with R(u,v) = [nabla_u, nabla_v] - nabla_{[u,v]}."""
        u = self.as_vector(u)
        v = self.as_vector(v)
        w = self.as_vector(w)
        return np.einsum("ijkl,...i,...j,...k->...l", self.curvature_tensor, u, v, w)

    def jacobi_matrix(self, u):
        """Matrix of v -> R(v, u)u in the frame; symmetric, annihilates u."""
        u = self.as_vector(u)
        # (Mv)_l = Rm[i,j,k,l] v_i u_j u_k
        return np.einsum("ijkl,...j,...k->...li", self.curvature_tensor, u, u)

    def jacobi_operator(self, u, tol=1e-10):
        u = self.as_vector(u)
        if abs(np.linalg.norm(u) - 1.0) > tol:
            raise ValueError("Jacobi operator requires a unit direction")
        return self.jacobi_matrix(u)

    def sectional_curvature(self, u, v):
        """Sectional curvature of span{u, v}, returned as (closed_form, direct).

        The direct value is <R(u,v)v, u> normalized by the Gram determinant.
        The closed form evaluates the display for orthonormal pairs whose
        second vector has no A-component; the plane basis is rotated into
        that shape first.
        """
        u = self.as_vector(u)
        v = self.as_vector(v)
        gram = np.sum(u * u) * np.sum(v * v) - np.sum(u * v) ** 2
        if gram < 1e-14:
            raise ValueError("degenerate plane")
        direct = float(np.einsum("ijkl,i,j,k,l->", self.curvature_tensor, u, v, v, u)) / gram

        e1, e2 = _orthonormal_plane_basis_no_a(u, v)
        closed = float(self.sectional_closed_form(e1, e2))
        return closed, direct

    def sectional_closed_form(self, x, w):
        """Closed-form K(P) for orthonormal x = U+X+rA and w = V+Y (no A-part)."""
        x = self.as_vector(x)
        w = self.as_vector(w)
        U, X, r = self.split(x)
        V, Y, sw = self.split(w)
        if abs(float(sw[..., 0])) > 1e-12:
            raise ValueError("closed form needs the second vector free of A-component")
        r = float(r[..., 0])
        alg = self.algebra
        buv = bracket_v(alg, U, V)
        t1 = -0.75 * np.sum((buv + r * Y) ** 2)
        t2 = -0.25 * r * r * np.sum(V * V) - 0.25 * r * r * np.sum(Y * Y)
        t3 = 0.25 * np.sum(V * V) * np.sum(X * X) + 0.25 * np.sum(U * U) * np.sum(Y * Y)
        t4 = -np.sum(j_map(alg, X, U) * j_map(alg, Y, V))
        t5 = 0.5 * np.sum(j_map(alg, X, V) * j_map(alg, Y, U))
        t6 = -(
            0.5 * np.sum(X * X) * np.sum(V * V)
            + 0.5 * np.sum(Y * Y) * np.sum(U * U)
            + 0.25 * np.sum(U * U) * np.sum(V * V)
            + np.sum(X * X) * np.sum(Y * Y)
            - np.sum(U * V) * np.sum(X * Y)
            - 0.25 * np.sum(U * V) ** 2
            - np.sum(X * Y) ** 2
        )
        return t1 + t2 + t3 + t4 + t5 + t6

    def ricci_matrix(self):
        """Ric[i, j] = trace of v -> R(v, E_i)E_j over the frame."""
        return np.einsum("lijl->ij", self.curvature_tensor)

    def einstein_constant(self):
        """(c, spread): Ricci = c * I; spread is the max deviation from c*I."""
        ric = self.ricci_matrix()
        c = float(np.trace(ric) / self.n)
        spread = float(np.max(np.abs(ric - c * np.eye(self.n))))
        return c, spread

    # -- group structure ----------------------------------------------------

    def multiply(self, p, q):
        p = self.as_point(p)
        q = self.as_point(q)
        U, X, a = self.multiply_arrays(p.U, p.X, p.a, q.U, q.X, q.a)
        return GroupPoint(U, X, float(a))

    def multiply_arrays(self, U, X, a, U1, X1, a1):
        """(U,X,a)(U1,X1,a1) = (U + sqrt(a) U1, X + a X1 + (sqrt(a)/2)[U,U1], a a1)."""
        U = np.asarray(U, dtype=float)
        X = np.asarray(X, dtype=float)
        a = np.asarray(a, dtype=float)
        ra = np.sqrt(a)
        U2 = U + ra[..., None] * U1
        X2 = X + a[..., None] * X1 + 0.5 * ra[..., None] * bracket_v(self.algebra, U, U1)
        return U2, X2, a * a1

    def inverse(self, p):
        p = self.as_point(p)
        ra = np.sqrt(p.a)
        return GroupPoint(-p.U / ra, -p.X / p.a, 1.0 / p.a)

    def frame_to_coordinates(self, p):
        """Change of basis at p between frame fields and coordinate fields.

        Returns (M, Minv): row i of M expresses the i-th frame field in the
        coordinate fields (d/dv, d/dy, d/dlambda); Minv is the inverse
        relation, and M @ Minv = I.
        """
        p = self.as_point(p)
        m, k, n = self.m, self.k, self.n
        a = p.a
        ra = np.sqrt(a)
        # C[i, alpha] = <[V_i, U], Y_alpha>
        C = bracket_v(self.algebra, np.eye(m), p.U[None, :].repeat(m, axis=0))
        M = np.zeros((n, n))
        M[:m, :m] = ra * np.eye(m)
        M[:m, m : m + k] = -0.5 * ra * C
        M[m : m + k, m : m + k] = a * np.eye(k)
        M[-1, -1] = 1.0
        Minv = np.zeros((n, n))
        Minv[:m, :m] = np.eye(m) / ra
        Minv[:m, m : m + k] = C / (2.0 * a)
        Minv[m : m + k, m : m + k] = np.eye(k) / a
        Minv[-1, -1] = 1.0
        return M, Minv


def sectional_closed_form_batch(space, x, w):
    """Vectorized closed-form K(P) for orthonormal pairs (x, w), w A-free."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    U, X, r = space.split(x)
    V, Y, _ = space.split(w)
    r = r[..., 0]
    alg = space.algebra
    buv = bracket_v(alg, U, V)
    dot = lambda a, b: np.sum(a * b, axis=-1)
    t1 = -0.75 * dot(buv + r[..., None] * Y, buv + r[..., None] * Y)
    t2 = -0.25 * r * r * (dot(V, V) + dot(Y, Y))
    t3 = 0.25 * dot(V, V) * dot(X, X) + 0.25 * dot(U, U) * dot(Y, Y)
    t4 = -dot(j_map(alg, X, U), j_map(alg, Y, V))
    t5 = 0.5 * dot(j_map(alg, X, V), j_map(alg, Y, U))
    t6 = -(
        0.5 * dot(X, X) * dot(V, V)
        + 0.5 * dot(Y, Y) * dot(U, U)
        + 0.25 * dot(U, U) * dot(V, V)
        + dot(X, X) * dot(Y, Y)
        - dot(U, V) * dot(X, Y)
        - 0.25 * dot(U, V) ** 2
        - dot(X, Y) ** 2
    )
    return t1 + t2 + t3 + t4 + t5 + t6


def plane_basis_no_a_batch(u, v):
    """Batched orthonormal plane bases (e1, e2) with e2 free of A-component."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    b1 = u / np.linalg.norm(u, axis=-1, keepdims=True)
    w = v - np.sum(v * b1, axis=-1, keepdims=True) * b1
    b2 = w / np.linalg.norm(w, axis=-1, keepdims=True)
    a1 = b1[..., -1]
    a2 = b2[..., -1]
    norm = np.hypot(a1, a2)
    safe = np.maximum(norm, 1e-300)
    c = np.where(norm < 1e-14, 1.0, a1 / safe)[..., None]
    s = np.where(norm < 1e-14, 0.0, a2 / safe)[..., None]
    e1 = c * b1 + s * b2
    e2 = -s * b1 + c * b2
    return e1, e2


def _orthonormal_plane_basis_no_a(u, v):
    """Orthonormal basis (e1, e2) of span{u, v} with e2 having zero A-part."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    q, _ = np.linalg.qr(np.stack([u, v], axis=1))
    b1, b2 = q[:, 0], q[:, 1]
    # rotate inside the plane so the second vector kills its A-component
    a1, a2 = b1[-1], b2[-1]
    norm = np.hypot(a1, a2)
    if norm < 1e-14:
        return b1, b2
    c, s = a1 / norm, a2 / norm
    e1 = c * b1 + s * b2
    e2 = -s * b1 + c * b2
    return e1, e2


def random_unit_directions(space, n_samples, rng, generic=False, min_part=0.05):
    """Uniform unit vectors in s; with generic=True both V and Y parts are
    bounded away from zero (resampled otherwise)."""
    out = np.empty((n_samples, space.n))
    count = 0
    while count < n_samples:
        cand = rng.standard_normal((n_samples, space.n))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        if generic:
            vn = np.linalg.norm(cand[:, : space.m], axis=1)
            yn = np.linalg.norm(cand[:, space.m : space.m + space.k], axis=1)
            cand = cand[(vn > min_part) & (yn > min_part)]
        take = min(len(cand), n_samples - count)
        out[count : count + take] = cand[:take]
        count += take
    return out
