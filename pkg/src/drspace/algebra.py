"""Generalized Heisenberg (H-type) algebras built from Clifford-module data.

An H-type algebra is a two-step nilpotent algebra n = v + z whose J-maps
satisfy J_Z^2 = -|Z|^2 id.  The raw input is a set of k generator matrices
J_1..J_k acting on R^m; every derived quantity (bracket constants, J_Z for
arbitrary Z) comes from these.  Bases are always the standard coordinate
bases of R^m and R^k, so orthonormality holds by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10

CATALOG_NAMES = ("heisenberg_q", "quaternionic_q", "cayley", "htype_k2")


class CliffordValidationError(ValueError):
    """Raised when a generator set violates one of the Clifford relations."""


@dataclass(frozen=True)
class CliffordModuleSpec:
    """Raw input defining an H-type algebra: dimensions plus generator matrices.

    Attributes:
        m: dimension of v.
        k: dimension of the center z.
        generators: array of shape (k, m, m); generators[a] is J_{a+1}.
    """

    m: int
    k: int
    generators: np.ndarray

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=float)
        if self.m < 1 or self.k < 1:
            raise CliffordValidationError("m and k must be positive integers")
        if gens.shape != (self.k, self.m, self.m):
            raise CliffordValidationError(
                f"generators must have shape ({self.k}, {self.m}, {self.m}), "
                f"got {gens.shape}"
            )
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class HeisenbergAlgebra:
    """Validated H-type algebra with derived bracket constants.

    bracket_constants[i, j, a] = <[V_i, V_j], Y_a> = <J_a V_i, V_j>.
    """

    spec: CliffordModuleSpec
    bracket_constants: np.ndarray

    @property
    def m(self):
        return self.spec.m

    @property
    def k(self):
        return self.spec.k

    @property
    def generators(self):
        return self.spec.generators

    def j_map(self, Z, V):
        """J_Z V = sum_a Z^a J_a V.  Broadcasts over leading axes."""
        return j_map(self, Z, V)

    def bracket_v(self, V, V1):
        """[V, V1] in z, defined by <[V,V1], Z> = <J_Z V, V1>."""
        return bracket_v(self, V, V1)


def j_map(alg, Z, V):
    Z = np.asarray(Z, dtype=float)
    V = np.asarray(V, dtype=float)
    return np.einsum("amn,...a,...n->...m", alg.spec.generators, Z, V)


def bracket_v(alg, V, V1):
    V = np.asarray(V, dtype=float)
    V1 = np.asarray(V1, dtype=float)
    # <[V,V1], Y_a> = <J_a V, V1>
    return np.einsum("amn,...n,...m->...a", alg.spec.generators, V, V1)


def validate_spec(spec: CliffordModuleSpec, tol: float = DEFAULT_TOL) -> None:
    """Check the Clifford relations; raise naming the failed relation.

    Relations checked on the generators:
      * skew-symmetry of each J_a,
      * J_a^2 = -I,
      * J_a J_b + J_b J_a = -2 delta_ab I.
    """
    gens = spec.generators
    eye = np.eye(spec.m)
    for a, J in enumerate(gens):
        res = np.max(np.abs(J + J.T))
        if res > tol:
            raise CliffordValidationError(
                f"skew-symmetry violated (generator {a + 1}), residual {res:.6g}"
            )
    for a, J in enumerate(gens):
        res = np.max(np.abs(J @ J + eye))
        if res > tol:
            raise CliffordValidationError(
                f"J^2 = -I violated (generator {a + 1}), residual {res:.6g}"
            )
    for a in range(spec.k):
        for b in range(a + 1, spec.k):
            anti = gens[a] @ gens[b] + gens[b] @ gens[a]
            res = np.max(np.abs(anti))
            if res > tol:
                raise CliffordValidationError(
                    f"anticommutator J_a J_b + J_b J_a = 0 violated "
                    f"(generators {a + 1}, {b + 1}), residual {res:.6g}"
                )


def build_algebra(spec: CliffordModuleSpec, tol: float = DEFAULT_TOL) -> HeisenbergAlgebra:
    """Validate the Clifford relations and derive the bracket constants."""
    validate_spec(spec, tol=tol)
    # c[i, j, a] = <J_a e_i, e_j> = generators[a][j, i]
    c = np.transpose(spec.generators, (2, 1, 0))
    return HeisenbergAlgebra(spec=spec, bracket_constants=np.ascontiguousarray(c))


def sample_identity_residuals(alg, rng, n_samples=1000):
    """Max residual of the defining J/bracket identities on random samples.

    Returns a dict of named residuals; all should sit at round-off for a
    valid algebra.  Used by the invariant suite.
    """
    m, k = alg.m, alg.k
    Z = rng.standard_normal((n_samples, k))
    Z1 = rng.standard_normal((n_samples, k))
    U = rng.standard_normal((n_samples, m))
    V = rng.standard_normal((n_samples, m))

    jz_u = j_map(alg, Z, U)
    jz_v = j_map(alg, Z, V)
    jz1_u = j_map(alg, Z1, U)
    jz1_v = j_map(alg, Z1, V)

    zn = np.sum(Z * Z, axis=1)
    uv = np.sum(U * V, axis=1)
    zz1 = np.sum(Z * Z1, axis=1)

    res = {}
    # J_Z^2 = -|Z|^2 id
    res["j_square"] = np.max(np.abs(j_map(alg, Z, jz_v) + zn[:, None] * V))
    # J_Z J_Z1 + J_Z1 J_Z = -2 <Z,Z1> id
    res["j_polarized"] = np.max(
        np.abs(j_map(alg, Z, jz1_v) + j_map(alg, Z1, jz_v) + 2.0 * zz1[:, None] * V)
    )
    # <J_Z U, J_Z1 V> + <J_Z1 U, J_Z V> = 2 <U,V><Z,Z1>
    res["isometry_polarized"] = np.max(
        np.abs(
            np.sum(jz_u * jz1_v, axis=1)
            + np.sum(jz1_u * jz_v, axis=1)
            - 2.0 * uv * zz1
        )
    )
    # [J_Z U, V] - [U, J_Z V] = -2 <U,V> Z
    res["bracket_shift"] = np.max(
        np.abs(
            bracket_v(alg, jz_u, V) - bracket_v(alg, U, jz_v) + 2.0 * uv[:, None] * Z
        )
    )
    # [J_Z U, J_Z V] = -|Z|^2 [U,V] - 2 <U, J_Z V> Z
    res["bracket_rotated"] = np.max(
        np.abs(
            bracket_v(alg, jz_u, jz_v)
            + zn[:, None] * bracket_v(alg, U, V)
            + 2.0 * np.sum(U * jz_v, axis=1)[:, None] * Z
        )
    )
    # [V, J_Z V] = |V|^2 Z
    res["bracket_diagonal"] = np.max(
        np.abs(bracket_v(alg, V, jz_v) - np.sum(V * V, axis=1)[:, None] * Z)
    )
    return res


# ---------------------------------------------------------------------------
# quaternion / octonion structure tensors

def _quaternion_table():
    """Structure tensor q[a, b, c]: (e_a e_b)_c for the basis 1, i, j, k."""
    t = np.zeros((4, 4, 4))
    # (index, sign) for products of the imaginary units
    prod = {
        (1, 1): (0, -1), (2, 2): (0, -1), (3, 3): (0, -1),
        (1, 2): (3, 1), (2, 1): (3, -1),
        (2, 3): (1, 1), (3, 2): (1, -1),
        (3, 1): (2, 1), (1, 3): (2, -1),
    }
    for c in range(4):
        t[0, c, c] = 1.0
        t[c, 0, c] = 1.0
    for (a, b), (c, s) in prod.items():
        t[a, b, c] = s
    t[0, 0, 0] = 1.0
    return t

_QT = _quaternion_table()


def _quat_mul(p, q):
    return np.einsum("abc,a,b->c", _QT, p, q)


def _quat_conj(p):
    out = -p.copy()
    out[0] = p[0]
    return out


def octonion_table():
    """Structure tensor o[a, b, c]: (e_a e_b)_c for the octonion basis e_0..e_7.

    Built by the Cayley-Dickson doubling (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c))
    over the quaternions, with e_4 = (0, 1).  The resulting products of the
    imaginary units follow a fixed Fano-plane orientation; the triple table is
    documented in the README.
    """
    t = np.zeros((8, 8, 8))
    basis = []
    for idx in range(8):
        a = np.zeros(4)
        b = np.zeros(4)
        if idx < 4:
            a[idx] = 1.0
        else:
            b[idx - 4] = 1.0
        basis.append((a, b))
    for ia, (a, b) in enumerate(basis):
        for ic, (c, d) in enumerate(basis):
            first = _quat_mul(a, c) - _quat_mul(_quat_conj(d), b)
            second = _quat_mul(d, a) + _quat_mul(b, _quat_conj(c))
            t[ia, ic, :4] = first
            t[ia, ic, 4:] = second
    return t


def octonion_triples():
    """The seven oriented Fano lines (a, b, c) with e_a e_b = e_c.

    Each line is rotated so its smallest index comes first; cyclic
    rotations of a line are equivalent orientations.
    """
    t = octonion_table()
    seen = {}
    for a in range(1, 8):
        for b in range(a + 1, 8):
            c = int(np.argmax(np.abs(t[a, b])))
            trip = (a, b, c) if t[a, b, c] > 0 else (b, a, c)
            key = frozenset(trip)
            rotations = [trip, trip[1:] + trip[:1], trip[2:] + trip[:2]]
            seen[key] = min(rot for rot in rotations if rot[0] == min(trip))
    return sorted(seen.values())


def _left_multiplication_matrices(table, units):
    """Matrices of x -> e_u x for each u in units, acting on the full algebra."""
    dim = table.shape[0]
    mats = []
    for u in units:
        L = np.zeros((dim, dim))
        for n in range(dim):
            L[:, n] = table[u, n]
        mats.append(L)
    return np.array(mats)


def _quaternionic_generators(q):
    """Left multiplication by i, j, k on H^q = R^{4q}."""
    base = _left_multiplication_matrices(_QT, [1, 2, 3])
    gens = np.zeros((3, 4 * q, 4 * q))
    for a in range(3):
        for b in range(q):
            gens[a, 4 * b:4 * b + 4, 4 * b:4 * b + 4] = base[a]
    return gens


def standard_instance(name: str, q: int = 1) -> CliffordModuleSpec:
    """Catalog of standard Clifford-module specs.

    Names: heisenberg_q (k=1, m=2q), quaternionic_q (k=3, m=4q),
    cayley (k=7, m=8), htype_k2 (k=2, m=4).
    """
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    if name == "heisenberg_q":
        m = 2 * q
        J = np.zeros((1, m, m))
        J[0, q:, :q] = np.eye(q)
        J[0, :q, q:] = -np.eye(q)
        return CliffordModuleSpec(m=m, k=1, generators=J)
    if name == "quaternionic_q":
        return CliffordModuleSpec(m=4 * q, k=3, generators=_quaternionic_generators(q))
    if name == "cayley":
        gens = _left_multiplication_matrices(octonion_table(), range(1, 8))
        return CliffordModuleSpec(m=8, k=7, generators=gens)
    if name == "htype_k2":
        gens = _quaternionic_generators(1)[:2]
        return CliffordModuleSpec(m=4, k=2, generators=gens)
    raise ValueError(f"unknown instance name {name!r}; valid: {', '.join(CATALOG_NAMES)}")


def parse_preset(token: str) -> CliffordModuleSpec:
    """Parse a CLI preset token like 'quaternionic_q=2' or 'cayley'."""
    name, _, qstr = token.partition("=")
    q = 1
    if qstr:
        try:
            q = int(qstr)
        except ValueError as exc:
            raise ValueError(f"bad preset parameter in {token!r}") from exc
    if name in ("heisenberg", "heisenberg_q"):
        return standard_instance("heisenberg_q", q)
    if name in ("quaternionic", "quaternionic_q"):
        return standard_instance("quaternionic_q", q)
    return standard_instance(name, q)


# ---------------------------------------------------------------------------
# spec file I/O (JSON)

def load_spec(path) -> CliffordModuleSpec:
    """Load a spec file: {"m": int, "k": int, "generators": [k matrices]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        m = int(data["m"])
        k = int(data["k"])
        gens = np.asarray(data["generators"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliffordValidationError(f"malformed spec file {path}: {exc}") from exc
    return CliffordModuleSpec(m=m, k=k, generators=gens)


def save_spec(spec: CliffordModuleSpec, path) -> None:
    data = {"m": spec.m, "k": spec.k, "generators": spec.generators.tolist()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
