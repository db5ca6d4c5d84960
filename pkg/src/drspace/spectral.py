"""Direction-adapted spectral decomposition of the Busemann Hessian.

For a generic unit direction V + Y + sA (V != 0, Y != 0) the algebra s
splits orthogonally into

    s = s4 + p + q,   q = q_0 + ... + q_l,

where s4 = span{V, J_Y V, Y, A}, p = Ker ad(V) n Ker ad(J_Y V), and the
q_j are built from the eigenspaces L_j of the square of the skew
endomorphism K = K_{V,Y} on Y-perp.  Both the Busemann Hessian at the
identity and the Jacobi operator of the direction block-diagonalize over
this splitting; the routines here construct the blocks, their closed-form
entries, and the associated eigenvalue checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import busemann, geodesics
from .algebra import bracket_v, j_map

__all__ = [
    "KEndomorphism", "AdmissibleDecomposition", "k_endomorphism",
    "ksquare_spectrum", "yperp_j_split", "admissible_decomposition",
    "hessian_blocks", "s4_block", "q_ell_block", "q0_block",
    "q_j_hermitian", "jacobi_cubic", "nongeneric_spectrum",
    "commutation_check", "identity_hessian_spectrum", "block_spectrum",
]

GENERIC_THRESHOLD = 1e-12
CLUSTER_TOL = 1e-8
RANK_CUTOFF = 1e-10


@dataclass(frozen=True)
class KEndomorphism:
    """Matrix of K(Z) = [Vhat, J_Z J_Yhat Vhat] on an orthonormal basis of Y-perp."""

    matrix: np.ndarray          # (k-1, k-1), skew
    ybasis: np.ndarray          # (k, k-1) orthonormal basis of Y-perp in z coords
    v_hat: np.ndarray
    y_hat: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]


def _householder_complement(unit):
    """Orthonormal basis of unit^perp (columns), via a Householder reflector."""
    unit = np.asarray(unit, dtype=float)
    d = unit.shape[0]
    w = unit.copy()
    w[0] += np.copysign(1.0, unit[0] if unit[0] != 0 else 1.0)
    Hmat = np.eye(d) - 2.0 * np.outer(w, w) / np.dot(w, w)
    return Hmat[:, 1:]


def k_endomorphism(space, V, Y):
    V = np.asarray(V, dtype=float)
    Y = np.asarray(Y, dtype=float)
    nv = np.linalg.norm(V)
    ny = np.linalg.norm(Y)
    if nv < GENERIC_THRESHOLD or ny < GENERIC_THRESHOLD:
        raise ValueError("K endomorphism requires nonzero V and Y")
    v_hat = V / nv
    y_hat = Y / ny
    if space.k == 1:
        return KEndomorphism(np.zeros((0, 0)), np.zeros((space.k, 0)), v_hat, y_hat)
    ybasis = _householder_complement(y_hat)
    jyv = j_map(space.algebra, y_hat, v_hat)
    # columns K(Z_b) for the basis Z_b of Y-perp
    images = bracket_v(
        space.algebra,
        np.broadcast_to(v_hat, (ybasis.shape[1], space.m)),
        j_map(space.algebra, ybasis.T, np.broadcast_to(jyv, (ybasis.shape[1], space.m))),
    )
    K = ybasis.T @ images.T
    return KEndomorphism(K, ybasis, v_hat, y_hat)


def ksquare_spectrum(K: KEndomorphism, cluster_tol=CLUSTER_TOL):
    """Distinct eigenvalues of K^2 with eigenspaces, as [(mu_j, zbasis_j)].

    mu_0 >= mu_1 >= ... >= mu_l, each zbasis an orthonormal (k, d_j) array
    in z coordinates.  Eigenvalues are clustered at relative tolerance.
    """
    if K.dim == 0:
        return []
    ksq = K.matrix @ K.matrix
    vals, vecs = np.linalg.eigh(ksq)
    order = np.argsort(-vals)  # descending: mu_0 first
    vals, vecs = vals[order], vecs[:, order]
    clusters = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or abs(vals[i] - vals[start]) > max(cluster_tol, cluster_tol * abs(vals[start])):
            mu = float(np.mean(vals[start:i]))
            zbasis = K.ybasis @ vecs[:, start:i]
            clusters.append((mu, zbasis))
            start = i
    return clusters


def yperp_j_split(K: KEndomorphism, tol=CLUSTER_TOL):
    """((Y-perp)_J, complement) = (eigenspace of K^2 at -1, the rest)."""
    spec = ksquare_spectrum(K)
    j_parts = [zb for mu, zb in spec if abs(mu + 1.0) <= tol]
    perp_parts = [zb for mu, zb in spec if abs(mu + 1.0) > tol]
    k = K.ybasis.shape[0]
    ypj = np.concatenate(j_parts, axis=1) if j_parts else np.zeros((k, 0))
    ypp = np.concatenate(perp_parts, axis=1) if perp_parts else np.zeros((k, 0))
    return ypj, ypp


def _paired_basis(K: KEndomorphism, mu, zbasis):
    """Reorder an L_j basis into Khat-pairs (Z_{2a} = Khat Z_{2a-1}).

    Only applies for mu < 0; for mu = 0 the basis is returned unchanged.
    All vectors are z-coordinate columns.
    """
    if mu >= -CLUSTER_TOL:
        return zbasis
    khat = K.matrix / np.sqrt(-mu)
    yb = K.ybasis
    coords = yb.T @ zbasis  # (k-1, d)
    d = coords.shape[1]
    picked = []
    remaining = coords.copy()
    while len(picked) < d:
        z1 = remaining[:, 0]
        z1 = z1 / np.linalg.norm(z1)
        z2 = khat @ z1
        picked.extend([z1, z2])
        span = np.stack(picked, axis=1)
        q, _ = np.linalg.qr(span)
        proj = np.eye(coords.shape[0]) - q @ q.T
        rem = proj @ remaining
        norms = np.linalg.norm(rem, axis=0)
        keep = norms > 1e-8
        remaining = rem[:, keep] / np.where(norms[keep] > 0, norms[keep], 1.0)
    cols = np.stack(picked, axis=1)
    return yb @ cols


@dataclass(frozen=True)
class QBlock:
    """One q_j block: eigenvalue mu_j of K^2 and its adapted frame basis."""

    mu: float
    zbasis: np.ndarray        # (k, d) in z coords, Khat-paired when mu < 0
    basis: np.ndarray         # (n, dim) frame vectors spanning q_j (raw order)

    @property
    def dim(self):
        return self.basis.shape[1]


@dataclass(frozen=True)
class AdmissibleDecomposition:
    direction: np.ndarray
    s4: np.ndarray            # (n, 4) orthonormal: unit V, unit J_Y V, unit Y, A
    s4_adapted: np.ndarray    # (n, 4): direction W0 and the adapted W1, W2, W3
    p: np.ndarray             # (n, dim_p) orthonormal
    ypj: np.ndarray           # (k, k1) basis of (Y-perp)_J
    ypj_perp: np.ndarray      # (k, k2) basis of the complement
    t1: np.ndarray            # (n, k1) frame basis of J_{(Y-perp)_J} V
    t2: np.ndarray            # (n, k2)
    t3: np.ndarray            # (n, k2)
    qblocks: tuple
    mus: tuple

    @property
    def k1(self):
        return self.ypj.shape[1]

    @property
    def k2(self):
        return self.ypj_perp.shape[1]

    @property
    def dim_p(self):
        return self.p.shape[1]

    def dimension_identity_holds(self, m):
        return m == 2 + self.dim_p + self.k1 + 2 * self.k2


def _nullspace(Amat, rcond=RANK_CUTOFF):
    u, s, vt = np.linalg.svd(Amat, full_matrices=True)
    if s.size:
        rank = int(np.sum(s > rcond * s[0]))
    else:
        rank = 0
    return vt[rank:].T


def adapted_s4_basis(space, direction):
    """W0 = direction and the adapted orthonormal triple W1, W2, W3 in s4."""
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    v_hat = V / nv
    y_hat = Y / ny
    jyv_hat = j_map(space.algebra, y_hat, v_hat)
    W1 = space.join(nv * jyv_hat, s * y_hat, -ny)
    W2 = space.join(s * v_hat - ny * jyv_hat, np.zeros(space.k), -nv)
    W3 = space.join(ny * v_hat + s * jyv_hat, -nv * y_hat, 0.0)
    return np.stack([w, W1, W2, W3], axis=1)


def admissible_decomposition(space, direction):
    """Construct the direction-adapted orthogonal splitting of s.

    Requires a generic direction (V != 0 and Y != 0); degenerate directions
    belong to the non-generic spectrum path.
    """
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    if nv < GENERIC_THRESHOLD or ny < GENERIC_THRESHOLD:
        raise ValueError("degenerate direction: use nongeneric_spectrum")
    m, k, n = space.m, space.k, space.n
    alg = space.algebra
    v_hat = V / nv
    y_hat = Y / ny
    jyv = j_map(alg, Y, V)
    s4 = np.stack(
        [
            space.from_v(v_hat),
            space.from_v(jyv / np.linalg.norm(jyv)),
            space.from_z(y_hat),
            space.a_vector(),
        ],
        axis=1,
    )
    # p = Ker ad(V) n Ker ad(J_Y V) inside v
    rows_v = np.einsum("amn,n->am", space.generators, V)
    rows_jyv = np.einsum("amn,n->am", space.generators, jyv)
    pbasis_v = _nullspace(np.concatenate([rows_v, rows_jyv], axis=0))
    p = np.zeros((n, pbasis_v.shape[1]))
    p[:m, :] = pbasis_v

    K = k_endomorphism(space, V, Y)
    spec = ksquare_spectrum(K)
    ypj, ypp = yperp_j_split(K)

    def jv_columns(zb, base):
        cols = j_map(alg, zb.T, np.broadcast_to(base, (zb.shape[1], m)))
        out = np.zeros((n, zb.shape[1]))
        out[:m, :] = cols.T
        return out

    jyv_hat = j_map(alg, y_hat, v_hat)
    t1 = jv_columns(ypj, v_hat)
    t2 = jv_columns(ypp, v_hat)
    t3 = jv_columns(ypp, jyv_hat)

    qblocks = []
    for mu, zb in spec:
        zb = _paired_basis(K, mu, zb)
        zcols = np.zeros((n, zb.shape[1]))
        zcols[m : m + k, :] = zb
        if abs(mu + 1.0) <= CLUSTER_TOL:
            basis = np.concatenate([jv_columns(zb, v_hat), zcols], axis=1)
        else:
            basis = np.concatenate(
                [jv_columns(zb, v_hat), jv_columns(zb, jyv_hat), zcols], axis=1
            )
        qblocks.append(QBlock(mu=mu, zbasis=zb, basis=basis))

    return AdmissibleDecomposition(
        direction=w,
        s4=s4,
        s4_adapted=adapted_s4_basis(space, w),
        p=p,
        ypj=ypj,
        ypj_perp=ypp,
        t1=t1,
        t2=t2,
        t3=t3,
        qblocks=tuple(qblocks),
        mus=tuple(mu for mu, _ in spec),
    )


def decomposition_residuals(space, decomp):
    """Orthogonality/completeness diagnostics for an admissible decomposition."""
    blocks = [decomp.s4, decomp.p] + [qb.basis for qb in decomp.qblocks]
    blocks = [b for b in blocks if b.shape[1] > 0]
    qs = []
    for b in blocks:
        q, _ = np.linalg.qr(b)
        qs.append(q)
    proj = sum(q @ q.T for q in qs)
    completeness = float(np.max(np.abs(proj - np.eye(space.n))))
    cross = 0.0
    for i in range(len(qs)):
        for j in range(i + 1, len(qs)):
            cross = max(cross, float(np.max(np.abs(qs[i].T @ qs[j]))))
    return {"completeness": completeness, "cross_orthogonality": cross}


# ---------------------------------------------------------------------------
# Hessian blocks

def hessian_blocks(space, direction):
    """Cross-block residuals of the identity Hessian and bracket checks.

    Verifies that the Hessian vanishes between s4^0, p and distinct q_j,
    that the p-block is (1/2) I, and that [v, J_Z Vhat] for Z in L_j stays
    in span{Z, KZ} with coefficients 2|V|(1-s)/chi_inf and -2|V||Y|/chi_inf.
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    H = busemann.hessian_at_identity(space, w)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    chi_inf = (1.0 - s) ** 2 + ny * ny

    s40 = decomp.s4_adapted[:, 1:]
    blocks = {"s4_0": s40}
    if decomp.dim_p:
        blocks["p"] = decomp.p
    for idx, qb in enumerate(decomp.qblocks):
        q, _ = np.linalg.qr(qb.basis)
        blocks[f"q_{idx}"] = q

    names = list(blocks)
    cross = 0.0
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            val = np.max(np.abs(blocks[names[i]].T @ H @ blocks[names[j]]))
            cross = max(cross, float(val))

    p_residual = 0.0
    if decomp.dim_p:
        pb = decomp.p
        p_residual = float(np.max(np.abs(pb.T @ H @ pb - 0.5 * np.eye(decomp.dim_p))))

    # bracket containment [v, J_Z Vhat] = (2|V|/chi)((1-s) Z - |Y| K Z)
    K = k_endomorphism(space, V, Y)
    bnd = busemann.boundary_coords(space, w)
    bracket_residual = 0.0
    for qb in decomp.qblocks:
        for col in range(qb.zbasis.shape[1]):
            Z = qb.zbasis[:, col]
            jzv = j_map(space.algebra, Z, V / nv)
            lhs = bracket_v(space.algebra, bnd.v, jzv)
            kz = K.ybasis @ (K.matrix @ (K.ybasis.T @ Z))
            rhs = (2.0 * nv / chi_inf) * ((1.0 - s) * Z - ny * kz)
            bracket_residual = max(bracket_residual, float(np.max(np.abs(lhs - rhs))))
    return {
        "cross_block": cross,
        "p_block_half_identity": p_residual,
        "bracket_containment": bracket_residual,
        **decomposition_residuals(space, decomp),
    }


def s4_block(space, direction):
    """Adapted-basis table of the Hessian on s4 and the Jacobi eigenvalues.

    The Hessian satisfies <H W1, W1> = 1, <H Wi, Wj> = delta_ij / 2 for
    i, j in {2, 3}, with the direction itself a null vector; the Jacobi
    operator has eigenvalues -1, -1/4, -1/4 on the same triple.
    """
    w = space.as_vector(direction)
    basis = adapted_s4_basis(space, w)
    H = busemann.hessian_at_identity(space, w)
    R = space.jacobi_matrix(w)
    table = basis[:, 1:].T @ H @ basis[:, 1:]
    expected = np.diag([1.0, 0.5, 0.5])
    null_residual = float(np.max(np.abs(H @ w)))
    jac_table = basis[:, 1:].T @ R @ basis[:, 1:]
    jac_expected = np.diag([-1.0, -0.25, -0.25])
    return {
        "basis": basis,
        "hessian_table": table,
        "hessian_residual": float(np.max(np.abs(table - expected))),
        "null_residual": null_residual,
        "jacobi_table": jac_table,
        "jacobi_residual": float(np.max(np.abs(jac_table - jac_expected))),
    }


def q_ell_block(space, direction):
    """The 4x4 blocks of the Hessian over t1 + (Y-perp)_J.

    Entries a = (1+|V|^2)/2, b = (1+s^2+|Y|^2)/2, c = s|V|/2, d = |Y||V|/2;
    the eigenvalues are 1 and 1/2 and the eigenvectors have the closed
    forms U1 = |V|^2 Z + J_Z(J_Y V - s V) and U2 = (|V|^2 - 1) Z + J_Z(J_Y V - s V).
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    ell_blocks = [qb for qb in decomp.qblocks if abs(qb.mu + 1.0) <= CLUSTER_TOL]
    if not ell_blocks:
        raise ValueError("(Y-perp)_J is trivial for this direction")
    qb = ell_blocks[0]
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    H = busemann.hessian_at_identity(space, w)

    a = 0.5 * (1.0 + nv * nv)
    b = 0.5 * (1.0 + s * s + ny * ny)
    c = 0.5 * s * nv
    d = 0.5 * ny * nv
    B_analytic = np.array(
        [
            [a, 0.0, c, d],
            [0.0, a, -d, c],
            [c, -d, b, 0.0],
            [d, c, 0.0, b],
        ]
    )

    k1 = qb.zbasis.shape[1]
    reports = []
    jyv_minus_sv = j_map(space.algebra, Y, V) - s * V
    for pair in range(k1 // 2):
        z1 = qb.zbasis[:, 2 * pair]
        z2 = qb.zbasis[:, 2 * pair + 1]
        cols = np.stack(
            [
                qb.basis[:, 2 * pair],       # J_{Z1} Vhat
                qb.basis[:, 2 * pair + 1],   # J_{Z2} Vhat
                space.from_z(z1),
                space.from_z(z2),
            ],
            axis=1,
        )
        B_num = cols.T @ H @ cols
        eigvals = np.sort(np.linalg.eigvalsh(B_num))
        char_res = max(
            abs((a - lam) * (b - lam) - c * c - d * d) for lam in (1.0, 0.5)
        )
        vec_residuals = []
        for z in (z1, z2):
            jz = j_map(space.algebra, z, jyv_minus_sv)
            u1 = space.join(jz, nv * nv * z, 0.0)
            u2 = space.join(jz, (nv * nv - 1.0) * z, 0.0)
            vec_residuals.append(float(np.max(np.abs(H @ u1 - 0.5 * u1))))
            vec_residuals.append(float(np.max(np.abs(H @ u2 - 1.0 * u2))))
        reports.append(
            {
                "matrix_residual": float(np.max(np.abs(B_num - B_analytic))),
                "eigenvalues": eigvals,
                "eigenvalue_residual": float(
                    np.max(np.abs(eigvals - np.array([0.5, 0.5, 1.0, 1.0])))
                ),
                "characteristic_residual": float(char_res),
                "eigenvector_residual": float(max(vec_residuals)),
            }
        )
    return {"B": B_analytic, "pairs": reports}


def q0_block(space, direction):
    """3x3 Hessian blocks over q_0 when mu_0 = 0, with the closed entries.

    The completed-square identity certifying positivity is checked on
    random coefficient triples; the minimum eigenvalue is returned.
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    zero_blocks = [qb for qb in decomp.qblocks if abs(qb.mu) <= CLUSTER_TOL]
    if not zero_blocks:
        raise ValueError("no mu = 0 eigenvalue for this direction")
    qb = zero_blocks[0]
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    chi_inf = (1.0 - s) ** 2 + ny * ny
    H = busemann.hessian_at_identity(space, w)
    r0 = qb.zbasis.shape[1]

    M_analytic = np.array(
        [
            [0.5 + nv * nv * (1.0 - s) ** 2 / (2.0 * chi_inf),
             0.5 * nv * nv * (1.0 - s) * ny / chi_inf,
             0.5 * nv * s],
            [0.5 * nv * nv * (1.0 - s) * ny / chi_inf,
             0.5 + nv * nv * ny * ny / (2.0 * chi_inf),
             -0.5 * nv * ny],
            [0.5 * nv * s,
             -0.5 * nv * ny,
             0.5 * (1.0 + s * s + ny * ny)],
        ]
    )

    rng = np.random.default_rng(12345)
    coeffs = rng.standard_normal((64, 3))
    quad = np.einsum("bi,ij,bj->b", coeffs, M_analytic, coeffs)
    ww, wp, zz = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2]
    squares = (
        nv * nv / (2.0 * chi_inf) * ((1.0 - s) * ww + ny * wp) ** 2
        + 0.5 * (ww + s * nv * zz) ** 2
        + 0.5 * (wp - ny * nv * zz) ** 2
        + 0.5 * (1.0 + (s * s + ny * ny) * (1.0 - nv * nv)) * zz * zz
    )
    square_residual = float(np.max(np.abs(quad - squares)))

    entry_residual = 0.0
    min_eig = np.inf
    for a_idx in range(r0):
        z = qb.zbasis[:, a_idx]
        cols = np.stack(
            [qb.basis[:, a_idx], qb.basis[:, r0 + a_idx], space.from_z(z)], axis=1
        )
        M_num = cols.T @ H @ cols
        entry_residual = max(entry_residual, float(np.max(np.abs(M_num - M_analytic))))
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(M_num))))
    return {
        "matrix": M_analytic,
        "entry_residual": entry_residual,
        "completed_square_residual": square_residual,
        "min_eigenvalue": min_eig,
    }


def q_j_hermitian(space, direction, j):
    """Hermitian 3x3 reduction of the Hessian on q_j for -1 < mu_j < 0.

    Returns the Hermitian matrix H (in the complexified paired basis), its
    leading minors and their closed forms
        det H2 = (1/4)(1+|V|^2) sin^2 theta,
        det H3 = (1/4) sin^2 theta - (|V|^4 |Y|^2 / (8 chi_inf)) sin^4 theta,
    where cos theta = sqrt(-mu_j), plus the real 6x6 entry residual.
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    qb = decomp.qblocks[j]
    mu = qb.mu
    if not (-1.0 + CLUSTER_TOL < mu < -CLUSTER_TOL):
        raise ValueError(f"mu_j must lie strictly inside (-1, 0), got {mu}")
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    chi_inf = (1.0 - s) ** 2 + ny * ny
    cos_t = np.sqrt(-mu)
    sin_sq = 1.0 + mu

    a = 0.5 + nv * nv / (2.0 * chi_inf) * ((1.0 - s) ** 2 + ny * ny * cos_t**2)
    b = 0.5 + nv * nv / (2.0 * chi_inf) * (ny * ny + (1.0 - s) ** 2 * cos_t**2)
    c = nv * nv / (2.0 * chi_inf) * (1.0 - s) * ny * sin_sq
    d = -0.5 * (1.0 + nv * nv) * cos_t
    f = 0.5 * s * nv
    g = 0.5 * ny * nv * cos_t
    h = -0.5 * ny * nv
    l = 0.5 * s * nv * cos_t
    t = 0.5 * (1.0 + s * s + ny * ny)

    H3 = np.array(
        [
            [a, c - 1j * d, f - 1j * g],
            [c + 1j * d, b, h - 1j * l],
            [f + 1j * g, h + 1j * l, t],
        ]
    )
    det2 = float((a * b - c * c - d * d))
    det3 = float(np.linalg.det(H3).real)
    det2_formula = 0.25 * (1.0 + nv * nv) * sin_sq
    det3_formula = 0.25 * sin_sq - nv**4 * ny**2 / (8.0 * chi_inf) * sin_sq**2
    det3_lower = sin_sq**2 * (2.0 * chi_inf - nv**4 * ny**2) / (8.0 * chi_inf)

    # real 6x6 coefficient matrix in the basis (W1, W2, W1', W2', Z1, Z2)
    M_form = np.array(
        [
            [a, 0, c, d, f, g],
            [0, a, -d, c, -g, f],
            [c, -d, b, 0, h, l],
            [d, c, 0, b, -l, h],
            [f, -g, h, -l, t, 0],
            [g, f, l, h, 0, t],
        ]
    )
    Hfull = busemann.hessian_at_identity(space, w)
    entry_residual = 0.0
    min_form_eig = np.inf
    r_j = qb.zbasis.shape[1] // 2
    for pair in range(r_j):
        z1 = qb.zbasis[:, 2 * pair]
        z2 = qb.zbasis[:, 2 * pair + 1]
        cols = np.stack(
            [
                qb.basis[:, 2 * pair],                    # J_{Z1} Vhat
                qb.basis[:, 2 * pair + 1],                # J_{Z2} Vhat
                qb.basis[:, qb.zbasis.shape[1] + 2 * pair],       # J_{Z1} J_Yhat Vhat
                qb.basis[:, qb.zbasis.shape[1] + 2 * pair + 1],   # J_{Z2} J_Yhat Vhat
                space.from_z(z1),
                space.from_z(z2),
            ],
            axis=1,
        )
        M_num = cols.T @ Hfull @ cols
        entry_residual = max(entry_residual, float(np.max(np.abs(M_num - M_form))))
        gram = cols.T @ cols
        gen_eigs = scipy.linalg.eigh(M_num, gram, eigvals_only=True)
        min_form_eig = min(min_form_eig, float(np.min(gen_eigs)))
    return {
        "H": H3,
        "mu": mu,
        "det2": det2,
        "det3": det3,
        "det2_formula": det2_formula,
        "det3_formula": det3_formula,
        "det3_lower_bound": det3_lower,
        "entry_residual": entry_residual,
        "min_operator_eigenvalue": min_form_eig,
    }


# ---------------------------------------------------------------------------
# Jacobi operator blocks

def jacobi_cubic(space, direction, mu):
    """Real roots (k1 <= k2 <= k3) of (k+1)(k+1/4)^2 = (27/64)|V|^4 |Y|^2 (1+mu).

    The substitution k = x - 1/2 gives the depressed cubic
    x^3 - (3/16) x + (1/32 - rhs) = 0, solved by the trigonometric form
    x_j = (1/2) cos((arccos(32 rhs - 1) - 2 pi j)/3); this stays accurate
    at the double-root ends rhs = 0 and rhs = 1/16.
    """
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    nv2 = float(np.sum(V * V))
    ny2 = float(np.sum(Y * Y))
    rhs = (27.0 / 64.0) * nv2 * nv2 * ny2 * (1.0 + mu)
    if rhs < -1e-12 or rhs > 1.0 / 16.0 + 1e-12:
        raise ArithmeticError(f"cubic right-hand side out of range: {rhs}")
    arg = np.clip(32.0 * rhs - 1.0, -1.0, 1.0)
    phi = np.arccos(arg)
    ks = np.array([0.5 * np.cos((phi - 2.0 * np.pi * j) / 3.0) - 0.5 for j in range(3)])
    return np.sort(ks)


def jacobi_block_eigenvalues(space, direction, qblock):
    """Eigenvalues of the Jacobi operator restricted to one q_j block."""
    w = space.as_vector(direction)
    R = space.jacobi_matrix(w)
    q, _ = np.linalg.qr(qblock.basis)
    return np.sort(np.linalg.eigvalsh(q.T @ R @ q))


# ---------------------------------------------------------------------------
# non-generic directions

def nongeneric_spectrum(space, direction):
    """Closed-form Hessian eigenstructure for V = 0, Y = 0 or s = +-1.

    Returns a list of (eigenvalue, orthonormal basis) pairs spanning
    direction^perp, plus the residual against a direct eigensolve.
    """
    w = space.as_vector(direction)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    m, k, n = space.m, space.k, space.n
    alg = space.algebra
    generic = nv >= GENERIC_THRESHOLD and ny >= GENERIC_THRESHOLD
    if generic:
        raise ValueError("generic direction: use admissible_decomposition")

    pairs = []
    if nv < GENERIC_THRESHOLD and ny < GENERIC_THRESHOLD:
        # s = +-1: v -> 1/2, z -> 1
        vblock = np.zeros((n, m))
        vblock[:m] = np.eye(m)
        zblock = np.zeros((n, k))
        zblock[m : m + k] = np.eye(k)
        pairs = [(0.5, vblock), (1.0, zblock)]
    elif ny < GENERIC_THRESHOLD:
        # V != 0, Y = 0
        v_hat = V / nv
        W2 = space.join(s * v_hat, np.zeros(k), -nv)
        rows_v = np.einsum("amn,n->am", space.generators, V)
        pv = _nullspace(rows_v)
        # remove the V direction from Ker ad(V)
        pv = pv - np.outer(v_hat, v_hat @ pv)
        if pv.shape[1]:
            u_svd, s_svd, _ = np.linalg.svd(pv, full_matrices=False)
            pv = u_svd[:, s_svd > 1e-10]
        half_basis = np.concatenate(
            [W2[:, None]] + ([np.vstack([pv, np.zeros((k + 1, pv.shape[1]))])] if pv.shape[1] else []),
            axis=1,
        )
        pairs.append((0.5, half_basis))
        # 2x2 blocks {J_Z Vhat, Z} with eigenvalues 1 and 1/2
        twob = np.array([[0.5 * (1 + nv * nv), 0.5 * s * nv], [0.5 * s * nv, 0.5 * (1 + s * s)]])
        evals, evecs = np.linalg.eigh(twob)
        for col, lam in enumerate(evals):
            vecs = []
            for alpha in range(k):
                z = np.eye(k)[alpha]
                jzv = space.from_v(j_map(alg, z, v_hat))
                zfull = space.from_z(z)
                vecs.append(evecs[0, col] * jzv + evecs[1, col] * zfull)
            pairs.append((float(lam), np.stack(vecs, axis=1)))
    else:
        # V = 0, Y != 0
        y_hat = Y / ny
        vblock = np.zeros((n, m))
        vblock[:m] = np.eye(m)
        pairs.append((0.5, vblock))
        ybasis = _householder_complement(y_hat)
        zblock = np.zeros((n, k - 1))
        zblock[m : m + k] = ybasis
        w_extra = space.join(np.zeros(m), s * y_hat, -ny)
        one_block = np.concatenate([zblock, w_extra[:, None]], axis=1)
        pairs.append((1.0, one_block))

    H = busemann.hessian_at_identity(space, w)
    residual = 0.0
    for lam, basis in pairs:
        if basis.shape[1] == 0:
            continue
        qmat, _ = np.linalg.qr(basis)
        residual = max(residual, float(np.max(np.abs(H @ qmat - lam * qmat))))
    return {"pairs": pairs, "eigenvector_residual": residual}


# ---------------------------------------------------------------------------
# full spectrum assembly and the commutation theorem

def identity_hessian_spectrum(space, direction):
    """Eigenvalues of the identity Hessian restricted to direction^perp."""
    w = space.as_vector(direction)
    H = busemann.hessian_at_identity(space, w)
    basis = _householder_complement(w)
    return np.sort(np.linalg.eigvalsh(basis.T @ H @ basis))


def block_spectrum(space, direction):
    """Union of the analytic block spectra over direction^perp (sorted).

    s4^0 contributes {1, 1/2, 1/2}; p contributes 1/2 per dimension; each
    q_j block contributes its closed-form entries' eigenvalues (operator
    eigenvalues through the Gram matrix for the paired bases).
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    V, Y, s = space.split(w)
    s = float(s[..., 0])
    nv, ny = np.linalg.norm(V), np.linalg.norm(Y)
    chi_inf = (1.0 - s) ** 2 + ny * ny
    vals = [1.0, 0.5, 0.5]
    vals.extend([0.5] * decomp.dim_p)
    for qb in decomp.qblocks:
        mu = qb.mu
        if abs(mu + 1.0) <= CLUSTER_TOL:
            k1 = qb.zbasis.shape[1]
            vals.extend([1.0] * k1 + [0.5] * k1)
        elif abs(mu) <= CLUSTER_TOL:
            rep = q0_block(space, w)
            lam = np.linalg.eigvalsh(rep["matrix"])
            for _ in range(qb.zbasis.shape[1]):
                vals.extend(lam.tolist())
        else:
            cos_t = np.sqrt(-mu)
            sin_sq = 1.0 + mu
            a = 0.5 + nv * nv / (2.0 * chi_inf) * ((1.0 - s) ** 2 + ny * ny * cos_t**2)
            b = 0.5 + nv * nv / (2.0 * chi_inf) * (ny * ny + (1.0 - s) ** 2 * cos_t**2)
            c = nv * nv / (2.0 * chi_inf) * (1.0 - s) * ny * sin_sq
            d = -0.5 * (1.0 + nv * nv) * cos_t
            f = 0.5 * s * nv
            g = 0.5 * ny * nv * cos_t
            h = -0.5 * ny * nv
            l = 0.5 * s * nv * cos_t
            t = 0.5 * (1.0 + s * s + ny * ny)
            M_form = np.array(
                [
                    [a, 0, c, d, f, g],
                    [0, a, -d, c, -g, f],
                    [c, -d, b, 0, h, l],
                    [d, c, 0, b, -l, h],
                    [f, -g, h, -l, t, 0],
                    [g, f, l, h, 0, t],
                ]
            )
            cols = qb.basis[:, [0, 1, qb.zbasis.shape[1], qb.zbasis.shape[1] + 1]]
            z1 = space.from_z(qb.zbasis[:, 0])
            z2 = space.from_z(qb.zbasis[:, 1])
            full_cols = np.concatenate([cols, z1[:, None], z2[:, None]], axis=1)
            gram = full_cols.T @ full_cols
            lam = scipy.linalg.eigh(M_form, gram, eigvals_only=True)
            for _ in range(qb.zbasis.shape[1] // 2):
                vals.extend(lam.tolist())
    return np.sort(np.asarray(vals))


def commutation_check(space, direction, ts=(-2.0, -1.0, 0.0, 1.0, 2.0)):
    """Commutation of the horosphere shape operator with the Jacobi operator.

    On f = s4^0 + p + t1 + (Y-perp)_J the two operators commute along the
    geodesic; the eigenvalues of S(t)|_f are constant in t, and each
    eigenvalue lambda < 0 of S pairs with the eigenvalue -lambda^2 of the
    Jacobi operator.
    """
    w = space.as_vector(direction)
    decomp = admissible_decomposition(space, w)
    bnd = busemann.boundary_coords(space, w)
    evaluator = busemann.BusemannEvaluator(space, bnd)

    fixed = [decomp.p, decomp.t1]
    k1 = decomp.k1
    zcols = np.zeros((space.n, k1))
    zcols[space.m : space.m + space.k] = decomp.ypj
    fixed.append(zcols)
    fixed = [b for b in fixed if b.shape[1] > 0]

    comm_res = 0.0
    invariance_res = 0.0
    eig_sets = []
    pair_res = 0.0
    for t in ts:
        vel = geodesics.geodesic_velocity(space, w, t)
        # s4 n gamma'(t)-perp, within the fixed 4-dim subspace s4
        s4 = decomp.s4
        coeff = s4.T @ vel
        basis4 = s4 @ _householder_complement(coeff / np.linalg.norm(coeff))
        fbasis = np.concatenate([basis4] + fixed, axis=1)
        q, _ = np.linalg.qr(fbasis)

        p = geodesics.geodesic_point(space, w, t)
        S = -evaluator.hessian(p)
        R = space.jacobi_matrix(vel)
        Sf = q.T @ S @ q
        Rf = q.T @ R @ q
        comm_res = max(comm_res, float(np.max(np.abs(Sf @ Rf - Rf @ Sf))))
        invariance_res = max(invariance_res, float(np.max(np.abs(S @ q - q @ Sf))))
        lam_s = np.sort(np.linalg.eigvalsh(Sf))
        lam_r = np.sort(np.linalg.eigvalsh(Rf))
        eig_sets.append(lam_s)
        for lam in lam_s:
            pair_res = max(pair_res, float(np.min(np.abs(lam_r - (-(lam * lam))))))
    eig_sets = np.stack(eig_sets)
    constancy = float(np.max(np.abs(eig_sets - eig_sets[0])))
    return {
        "commutator": comm_res,
        "invariance": invariance_res,
        "eigenvalue_constancy": constancy,
        "pairing_residual": pair_res,
        "eigenvalues": eig_sets[0],
    }
