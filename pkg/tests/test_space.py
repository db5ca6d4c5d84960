import numpy as np
import pytest

from drspace.space import GroupPoint, random_unit_directions


def test_bracket_table(any_space):
    sp = any_space
    A = sp.a_vector()
    V = sp.from_v(np.eye(sp.m)[0])
    Y = sp.from_z(np.eye(sp.k)[0])
    np.testing.assert_allclose(sp.bracket(A, V), 0.5 * V, atol=1e-15)
    np.testing.assert_allclose(sp.bracket(A, Y), Y, atol=1e-15)
    x = np.arange(1.0, sp.n + 1.0)
    assert np.max(np.abs(sp.bracket(x, x))) == 0.0
    # A-component of any bracket vanishes
    y = np.sin(np.arange(sp.n))
    assert sp.bracket(x, y)[-1] == 0.0


def test_group_identity_and_inverse(any_space, rng):
    sp = any_space
    e = sp.identity()
    p = GroupPoint(rng.standard_normal(sp.m), rng.standard_normal(sp.k), 1.7)
    for q in (sp.multiply(p, e), sp.multiply(e, p)):
        np.testing.assert_allclose(q.U, p.U, atol=1e-15)
        np.testing.assert_allclose(q.X, p.X, atol=1e-15)
        assert abs(q.a - p.a) < 1e-15
    r = sp.multiply(sp.inverse(p), p)
    assert max(np.max(np.abs(r.U)), np.max(np.abs(r.X)), abs(r.a - 1)) < 1e-12
    # explicit inverse of a vertical point
    vert = GroupPoint(np.zeros(sp.m), np.zeros(sp.k), 3.0)
    inv = sp.inverse(vert)
    assert abs(inv.a - 1.0 / 3.0) < 1e-15


def test_group_associativity(any_space, rng):
    sp = any_space
    worst = 0.0
    for _ in range(100):
        ps = [GroupPoint(rng.standard_normal(sp.m), rng.standard_normal(sp.k),
                         float(np.exp(rng.uniform(-1, 1)))) for _ in range(3)]
        lhs = sp.multiply(sp.multiply(ps[0], ps[1]), ps[2])
        rhs = sp.multiply(ps[0], sp.multiply(ps[1], ps[2]))
        worst = max(worst, np.max(np.abs(lhs.U - rhs.U)),
                    np.max(np.abs(lhs.X - rhs.X)), abs(lhs.a - rhs.a))
    assert worst < 1e-12


def test_frame_to_coordinates(any_space, rng):
    sp = any_space
    # at the identity the v-block is plain
    M, Minv = sp.frame_to_coordinates(sp.identity())
    np.testing.assert_allclose(M, np.eye(sp.n), atol=1e-15)
    # Y_alpha = a d/dy_alpha on the vertical axis
    p = GroupPoint(np.zeros(sp.m), np.zeros(sp.k), 2.5)
    M, Minv = sp.frame_to_coordinates(p)
    np.testing.assert_allclose(M[sp.m:sp.m + sp.k, sp.m:sp.m + sp.k],
                               2.5 * np.eye(sp.k), atol=1e-15)
    # forward compose inverse = identity at random points
    p = GroupPoint(rng.standard_normal(sp.m), rng.standard_normal(sp.k), 1.3)
    M, Minv = sp.frame_to_coordinates(p)
    np.testing.assert_allclose(M @ Minv, np.eye(sp.n), atol=1e-12)


def test_connection_table(any_space, rng):
    sp = any_space
    A = sp.a_vector()
    V = sp.from_v(np.eye(sp.m)[0])
    Y = sp.from_z(np.eye(sp.k)[0])
    assert np.max(np.abs(sp.nabla(A, A))) == 0.0
    assert np.max(np.abs(sp.nabla(A, V))) == 0.0
    np.testing.assert_allclose(sp.nabla(Y, Y), A, atol=1e-15)
    np.testing.assert_allclose(sp.nabla(V, A), -0.5 * V, atol=1e-15)
    np.testing.assert_allclose(sp.nabla(Y, A), -Y, atol=1e-15)
    # torsion-free and metric-compatible on random samples
    x = rng.standard_normal((1000, sp.n))
    y = rng.standard_normal((1000, sp.n))
    z = rng.standard_normal((1000, sp.n))
    torsion = sp.nabla(x, y) - sp.nabla(y, x) - sp.bracket(x, y)
    assert np.max(np.abs(torsion)) < 1e-12
    compat = np.einsum("bi,bi->b", sp.nabla(x, y), z) \
        + np.einsum("bi,bi->b", y, sp.nabla(x, z))
    assert np.max(np.abs(compat)) < 1e-12


def test_curvature_symmetries(any_space):
    sp = any_space
    Rm = sp.curvature_tensor
    assert np.max(np.abs(Rm + np.swapaxes(Rm, 0, 1))) < 1e-13
    assert np.max(np.abs(Rm - np.transpose(Rm, (2, 3, 0, 1)))) < 1e-13
    bianchi = Rm + np.transpose(Rm, (1, 2, 0, 3)) + np.transpose(Rm, (2, 0, 1, 3))
    assert np.max(np.abs(bianchi)) < 1e-13


def test_reference_curvature_values(any_space):
    sp = any_space
    A = sp.a_vector()
    V = sp.from_v(np.eye(sp.m)[0])
    Y = sp.from_z(np.eye(sp.k)[0])
    assert abs(np.dot(sp.curvature(V, A, A), V) + 0.25) < 1e-14
    assert abs(np.dot(sp.curvature(Y, A, A), Y) + 1.0) < 1e-14
    closed, direct = sp.sectional_curvature(A, V)
    assert abs(closed + 0.25) < 1e-14 and abs(direct + 0.25) < 1e-14
    closed, direct = sp.sectional_curvature(A, Y)
    assert abs(closed + 1.0) < 1e-14 and abs(direct + 1.0) < 1e-14


def test_jacobi_operator(any_space, rng):
    sp = any_space
    A = sp.a_vector()
    R = sp.jacobi_operator(A)
    lam = np.sort(np.linalg.eigvalsh(R))
    expect = np.sort(np.concatenate([[-1.0] * sp.k, [-0.25] * sp.m, [0.0]]))
    np.testing.assert_allclose(lam, expect, atol=1e-13)
    with pytest.raises(ValueError, match="unit"):
        sp.jacobi_operator(2.0 * A)
    dirs = random_unit_directions(sp, 50, rng)
    for d in dirs:
        M = sp.jacobi_operator(d)
        assert np.max(np.abs(M - M.T)) < 1e-13
        lam = np.linalg.eigvalsh(M)
        assert lam.min() > -1.0 - 1e-10 and lam.max() < 1e-10


def test_sectional_curvature_random(any_space, rng):
    sp = any_space
    worst = 0.0
    for _ in range(200):
        u = rng.standard_normal(sp.n)
        v = rng.standard_normal(sp.n)
        closed, direct = sp.sectional_curvature(u, v)
        worst = max(worst, abs(closed - direct))
        assert direct <= 1e-12
    assert worst < 1e-12
    with pytest.raises(ValueError, match="degenerate"):
        sp.sectional_curvature(np.eye(sp.n)[0], np.eye(sp.n)[0])


def test_ricci_einstein(any_space, rng):
    sp = any_space
    c, spread = sp.einstein_constant()
    assert c < 0
    assert spread < 1e-12
    # Ric(u, u)/|u|^2 equals c for arbitrary directions
    for _ in range(10):
        u = rng.standard_normal(sp.n)
        val = np.einsum("i,ij,j->", u, sp.ricci_matrix(), u) / np.dot(u, u)
        assert abs(val - c) < 1e-12


def test_flat_plane_configuration_exists(htype_k2):
    # orthonormal pair of the stated shape with K(P) = 0
    sp = htype_k2
    from drspace.riccati import flat_plane_candidate

    d, xi = flat_plane_candidate(sp, np.random.default_rng(4))
    closed, direct = sp.sectional_curvature(d, xi)
    assert abs(direct) < 1e-14
    assert abs(closed) < 1e-14
