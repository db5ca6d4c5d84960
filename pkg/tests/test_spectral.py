import numpy as np
import pytest

from drspace import busemann as bus
from drspace import spectral as spec
from drspace.space import random_unit_directions


def generic_direction(sp, rng):
    return random_unit_directions(sp, 1, rng, generic=True)[0]


def test_k_endomorphism_skew_and_errors(any_space, rng):
    sp = any_space
    if sp.k == 1:
        K = spec.k_endomorphism(sp, np.eye(sp.m)[0], np.eye(sp.k)[0])
        assert K.dim == 0
        return
    d = generic_direction(sp, rng)
    V, Y, _ = sp.split(d)
    K = spec.k_endomorphism(sp, V, Y)
    assert np.max(np.abs(K.matrix + K.matrix.T)) < 1e-12
    with pytest.raises(ValueError):
        spec.k_endomorphism(sp, np.zeros(sp.m), Y)
    with pytest.raises(ValueError):
        spec.k_endomorphism(sp, V, np.zeros(sp.k))


def test_ksquare_spectrum_ranges(any_space, rng):
    sp = any_space
    if sp.k == 1:
        return
    for _ in range(20):
        d = generic_direction(sp, rng)
        V, Y, _ = sp.split(d)
        K = spec.k_endomorphism(sp, V, Y)
        for mu, zb in spec.ksquare_spectrum(K):
            assert -1.0 - 1e-10 <= mu <= 1e-10
            # eigenbasis orthonormal and K-invariant
            np.testing.assert_allclose(zb.T @ zb, np.eye(zb.shape[1]), atol=1e-10)
            coords = K.ybasis.T @ zb
            img = K.matrix @ coords
            proj = coords @ (coords.T @ img)
            assert np.max(np.abs(img - proj)) < 1e-8


def test_quaternionic_ksquare_is_minus_identity(quaternionic, rng):
    sp = quaternionic
    for _ in range(10):
        d = generic_direction(sp, rng)
        V, Y, _ = sp.split(d)
        K = spec.k_endomorphism(sp, V, Y)
        ksq = K.matrix @ K.matrix
        np.testing.assert_allclose(ksq, -np.eye(2), atol=1e-12)
        ypj, ypp = spec.yperp_j_split(K)
        assert ypj.shape[1] == 2 and ypp.shape[1] == 0


def test_htype_k2_k_vanishes(htype_k2, rng):
    sp = htype_k2
    d = generic_direction(sp, rng)
    V, Y, _ = sp.split(d)
    K = spec.k_endomorphism(sp, V, Y)
    assert K.dim == 1
    assert np.max(np.abs(K.matrix)) < 1e-14
    clusters = spec.ksquare_spectrum(K)
    assert len(clusters) == 1 and abs(clusters[0][0]) < 1e-14
    ypj, ypp = spec.yperp_j_split(K)
    assert ypj.shape[1] == 0 and ypp.shape[1] == 1


def test_anisotropic_mu_sweeps_open_interval(anisotropic):
    sp = anisotropic
    # V = (p, q) with |p|^2 - |q|^2 = c gives mu = -c^2 on Y-perp
    for c in (0.3, 0.6, 0.9):
        p2 = (1.0 + c) / 2.0
        V = np.zeros(sp.m)
        V[0] = np.sqrt(p2)
        V[4] = np.sqrt(1.0 - p2)
        Y = np.eye(sp.k)[2]
        K = spec.k_endomorphism(sp, V, Y)
        mus = [mu for mu, _ in spec.ksquare_spectrum(K)]
        assert len(mus) == 1
        assert abs(mus[0] + c * c) < 1e-12


def test_admissible_decomposition_dimensions(spaces, anisotropic, rng):
    expected = {
        "heisenberg": (0, 0, 0),
        "quaternionic": (0, 2, 0),
        "htype_k2": (0, 0, 1),
        "cayley": (0, 6, 0),
    }
    for name, (dim_p, k1, k2) in expected.items():
        sp = spaces[name]
        d = generic_direction(sp, rng)
        dec = spec.admissible_decomposition(sp, d)
        assert (dec.dim_p, dec.k1, dec.k2) == (dim_p, k1, k2)
        assert dec.dimension_identity_holds(sp.m)
        res = spec.decomposition_residuals(sp, dec)
        assert max(res.values()) < 1e-10
    dec = spec.admissible_decomposition(anisotropic, generic_direction(anisotropic, rng))
    assert (dec.dim_p, dec.k1, dec.k2) == (2, 0, 2)
    assert dec.dimension_identity_holds(anisotropic.m)


def test_decomposition_rejects_degenerate(quaternionic):
    sp = quaternionic
    with pytest.raises(ValueError, match="degenerate"):
        spec.admissible_decomposition(sp, sp.a_vector())


def test_hessian_blocks_cross_terms(any_space, rng):
    sp = any_space
    rep = spec.hessian_blocks(sp, generic_direction(sp, rng))
    assert rep["cross_block"] < 1e-10
    assert rep["p_block_half_identity"] < 1e-10
    assert rep["bracket_containment"] < 1e-10
    assert rep["completeness"] < 1e-10


def test_s4_block_table(any_space, rng):
    sp = any_space
    rep = spec.s4_block(sp, generic_direction(sp, rng))
    assert rep["hessian_residual"] < 1e-10
    assert rep["null_residual"] < 1e-10
    assert rep["jacobi_residual"] < 1e-10


def test_q_ell_block(quaternionic, cayley, rng):
    for sp in (quaternionic, cayley):
        rep = spec.q_ell_block(sp, generic_direction(sp, rng))
        for pair in rep["pairs"]:
            assert pair["matrix_residual"] < 1e-12
            assert pair["eigenvalue_residual"] < 1e-12
            assert pair["characteristic_residual"] < 1e-12
            assert pair["eigenvector_residual"] < 1e-12


def test_q_ell_requires_nontrivial_subspace(htype_k2, rng):
    with pytest.raises(ValueError):
        spec.q_ell_block(htype_k2, generic_direction(htype_k2, rng))


def test_q0_block(htype_k2, rng):
    sp = htype_k2
    floors = []
    for _ in range(50):
        rep = spec.q0_block(sp, generic_direction(sp, rng))
        assert rep["entry_residual"] < 1e-10
        assert rep["completed_square_residual"] < 1e-12
        floors.append(rep["min_eigenvalue"])
    assert min(floors) > 0.05


def test_q_j_hermitian_minors(anisotropic, rng):
    sp = anisotropic
    for _ in range(20):
        d = generic_direction(sp, rng)
        dec = spec.admissible_decomposition(sp, d)
        js = [j for j, mu in enumerate(dec.mus) if -1 + 1e-8 < mu < -1e-8]
        if not js:
            continue
        rep = spec.q_j_hermitian(sp, d, js[0])
        assert abs(rep["det2"] - rep["det2_formula"]) < 1e-10
        assert abs(rep["det3"] - rep["det3_formula"]) < 1e-10
        assert rep["det3"] > rep["det3_lower_bound"] - 1e-12
        assert rep["det2"] > 0 and rep["det3"] > 0
        assert rep["entry_residual"] < 1e-10
        assert rep["min_operator_eigenvalue"] > 0


def test_q_j_degenerates_toward_q_ell(anisotropic):
    # mu -> -1 makes sin(theta) -> 0 and det H2 -> 0
    sp = anisotropic
    dets = []
    for c in (0.9, 0.99, 0.999):
        p2 = (1.0 + c) / 2.0
        V = np.zeros(sp.m)
        V[0] = np.sqrt(p2) * np.sqrt(0.6)
        V[4] = np.sqrt(1.0 - p2) * np.sqrt(0.6)
        Y = np.eye(sp.k)[2] * np.sqrt(0.3)
        s = np.sqrt(1.0 - 0.6 - 0.3)
        d = sp.join(V, Y, s)
        dec = spec.admissible_decomposition(sp, d)
        js = [j for j, mu in enumerate(dec.mus) if -1 + 1e-8 < mu < -1e-8]
        rep = spec.q_j_hermitian(sp, d, js[0])
        dets.append(rep["det2"])
    assert dets[0] > dets[1] > dets[2]


def test_jacobi_cubic_reference_cases(htype_k2, quaternionic):
    sp = htype_k2
    V = np.zeros(sp.m)
    V[0] = np.sqrt(2.0 / 3.0)
    Y = np.zeros(sp.k)
    Y[0] = 1.0 / np.sqrt(3.0)
    d = sp.join(V, Y, 0.0)
    roots = spec.jacobi_cubic(sp, d, 0.0)
    np.testing.assert_allclose(roots, [-0.75, -0.75, 0.0], atol=1e-14)
    # |V| = 0 forces the factored roots
    d2 = quaternionic.join(np.zeros(quaternionic.m),
                           np.array([0.6, 0.0, 0.0]), 0.8)
    roots = spec.jacobi_cubic(quaternionic, d2, -0.5)
    np.testing.assert_allclose(roots, [-1.0, -0.25, -0.25], atol=1e-14)


def test_jacobi_cubic_vs_eigensolve(spaces, anisotropic, rng):
    insts = [spaces[n] for n in ("quaternionic", "htype_k2", "cayley")]
    insts.append(anisotropic)
    for sp in insts:
        for _ in range(5):
            d = generic_direction(sp, rng)
            dec = spec.admissible_decomposition(sp, d)
            for qb in dec.qblocks:
                eigs = np.sort(spec.jacobi_block_eigenvalues(sp, d, qb))
                roots = spec.jacobi_cubic(sp, d, qb.mu)
                if abs(qb.mu + 1.0) <= 1e-8:
                    k1 = qb.zbasis.shape[1]
                    expect = np.sort(np.concatenate([
                        np.full(k1, -1.0), np.full(k1, -0.25)]))
                else:
                    expect = np.sort(np.tile(roots, qb.basis.shape[1] // 3))
                    assert -1.0 < roots[0] <= -0.75 + 1e-12
                    assert -0.75 - 1e-12 <= roots[1] < -0.25
                    assert -0.25 < roots[2] <= 1e-12
                assert np.max(np.abs(eigs - expect)) < 1e-9


def test_nongeneric_spectrum_cases(quaternionic, rng):
    sp = quaternionic
    # V != 0, Y = 0
    v = np.zeros(sp.m)
    v[1] = 0.6
    d = sp.join(v, np.zeros(sp.k), -0.8)
    rep = spec.nongeneric_spectrum(sp, d)
    assert rep["eigenvector_residual"] < 1e-12
    # V = 0, Y != 0: Y-perp carries eigenvalue 1
    y = np.zeros(sp.k)
    y[0] = 0.6
    d = sp.join(np.zeros(sp.m), y, 0.8)
    rep = spec.nongeneric_spectrum(sp, d)
    assert rep["eigenvector_residual"] < 1e-12
    lams = sorted(l for l, b in rep["pairs"] for _ in range(b.shape[1]))
    expect = sorted([0.5] * sp.m + [1.0] * sp.k)
    np.testing.assert_allclose(lams, expect)
    # s = -1
    rep = spec.nongeneric_spectrum(sp, -sp.a_vector())
    assert rep["eigenvector_residual"] < 1e-12
    with pytest.raises(ValueError, match="generic"):
        spec.nongeneric_spectrum(sp, generic_direction(sp, rng))


def test_full_spectrum_union(spaces, anisotropic, rng):
    insts = list(spaces.values()) + [anisotropic]
    for sp in insts:
        for _ in range(5):
            d = generic_direction(sp, rng)
            direct = spec.identity_hessian_spectrum(sp, d)
            assembled = spec.block_spectrum(sp, d)
            assert direct.shape == assembled.shape
            assert np.max(np.abs(direct - assembled)) < 1e-9
            assert direct[0] > 0 and direct[-1] <= 1.0 + 1e-10
            # the extreme block values 1/2 and 1 are attained
            assert np.min(np.abs(direct - 0.5)) < 1e-9
            assert np.min(np.abs(direct - 1.0)) < 1e-9


def test_commutation_along_geodesic(spaces, anisotropic, rng):
    insts = list(spaces.values()) + [anisotropic]
    for sp in insts:
        d = generic_direction(sp, rng)
        rep = spec.commutation_check(sp, d, ts=(-2.0, -1.0, 0.0, 1.0, 2.0))
        assert rep["commutator"] < 1e-8
        assert rep["invariance"] < 1e-8
        assert rep["eigenvalue_constancy"] < 1e-8
        assert rep["pairing_residual"] < 1e-8
        lam = rep["eigenvalues"]
        assert set(np.round(lam, 6)) <= {-1.0, -0.5}
