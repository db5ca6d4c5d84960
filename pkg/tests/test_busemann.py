import numpy as np
import pytest

from drspace import busemann as bus
from drspace import geodesics as geo
from drspace.space import random_unit_directions


def test_boundary_coords_special_directions(quaternionic):
    sp = quaternionic
    minus_a = -sp.a_vector()
    bnd = bus.boundary_coords(sp, minus_a)
    assert not bnd.pole
    assert np.max(np.abs(bnd.v)) == 0.0 and np.max(np.abs(bnd.y)) == 0.0
    assert bus.boundary_coords(sp, sp.a_vector()).pole
    vhat = sp.from_v(np.eye(sp.m)[0])
    bnd = bus.boundary_coords(sp, vhat)
    np.testing.assert_allclose(bnd.v, 2.0 * vhat[: sp.m], atol=1e-15)
    assert np.max(np.abs(bnd.y)) == 0.0


def test_value_normalization_and_ray(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    assert abs(ev.value(sp.identity())) < 1e-14
    for t in (-3, -1, 0, 1, 3):
        p = geo.geodesic_point(sp, d, float(t))
        assert abs(ev.value(p) + t) < 1e-12


def test_limit_oracle(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    p = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], 1.1)
    vals = [bus.busemann_limit_oracle(sp, p, d, T) for T in (5, 10, 20, 30)]
    # monotone non-increasing in T, converging to the closed form
    assert all(vals[i] >= vals[i + 1] - 1e-12 for i in range(len(vals) - 1))
    assert abs(vals[-1] - ev.value(p)) < 1e-6
    # points on the ray give the exact value for any T beyond them
    q = geo.geodesic_point(sp, d, 5.0)
    assert abs(bus.busemann_limit_oracle(sp, q, d, 12.0) + 5.0) < 1e-12


def test_pole_value_and_oracle(any_space):
    sp = any_space
    pole = bus.IdealBoundaryPoint(np.zeros(sp.m), np.zeros(sp.k), pole=True)
    p = sp.as_point((np.zeros(sp.m), np.zeros(sp.k), 2.2))
    assert abs(bus.busemann_value(sp, p, pole) + np.log(2.2)) < 1e-15
    oracle = bus.busemann_limit_oracle(sp, p, sp.a_vector(), 30.0)
    assert abs(oracle + np.log(2.2)) < 1e-10


def test_gradient_on_ray_and_unit_norm(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    for t in (-1.0, 0.0, 2.0):
        g = ev.gradient(geo.geodesic_point(sp, d, t))
        np.testing.assert_allclose(g, -geo.geodesic_velocity(sp, d, t), atol=1e-12)
    for _ in range(50):
        d2 = random_unit_directions(sp, 1, rng)[0]
        p = geo.geodesic_point(sp, d2, rng.uniform(-2, 2))
        assert abs(np.linalg.norm(ev.gradient(p)) - 1.0) < 1e-10


def test_gradient_fd(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    p = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], 0.8)
    fd = bus.fd_gradient(sp, p, ev.value_arrays)
    assert np.max(np.abs(fd - ev.gradient(p))) < 1e-6


def test_hessian_fd_and_structure(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    p = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], -0.7)
    H = ev.hessian(p)
    assert np.max(np.abs(H - H.T)) < 1e-14
    # gradient is a null direction; spectrum is positive semi-definite
    assert np.max(np.abs(H @ ev.gradient(p))) < 1e-12
    assert np.min(np.linalg.eigvalsh(H)) > -1e-12
    fd = bus.fd_hessian(sp, p, ev.value_arrays)
    assert np.max(np.abs(H - fd)) < 1e-5


def test_hessian_identity_consistency(any_space, rng):
    sp = any_space
    for d in random_unit_directions(sp, 10, rng):
        Hi = bus.hessian_at_identity(sp, d)
        He = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d)).hessian(sp.identity())
        assert np.max(np.abs(Hi - He)) < 1e-12


def test_identity_spectra_special_directions(any_space):
    sp = any_space
    # A direction: pole Hessian with eigenvalues 1/2 on v, 1 on z, 0 on A
    H = bus.hessian_at_identity(sp, sp.a_vector())
    np.testing.assert_allclose(H, bus.hessian_pole(sp), atol=1e-15)
    # -A has the same spectrum by the closed form
    lam = np.sort(np.linalg.eigvalsh(bus.hessian_at_identity(sp, -sp.a_vector())))
    expect = np.sort(np.concatenate([[0.0], [0.5] * sp.m, [1.0] * sp.k]))
    np.testing.assert_allclose(lam, expect, atol=1e-12)


def test_generic_direction_positive_definite(any_space, rng):
    sp = any_space
    from drspace.spectral import identity_hessian_spectrum

    for d in random_unit_directions(sp, 20, rng):
        lam = identity_hessian_spectrum(sp, d)
        assert lam[0] > 0.0
        assert lam[-1] <= 1.0 + 1e-10


def test_identity_auxiliaries(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng, generic=True)[0]
    aux = bus.identity_auxiliaries(sp, d)
    np.testing.assert_allclose(aux["fv_minus_jyv"], aux["fv_minus_jyv_expected"],
                               atol=1e-13)
    assert abs(aux["four_f_minus_F"] - aux["four_f_minus_F_expected"]) < 1e-13


def test_pole_hessian_matches_fd(quaternionic, rng):
    sp = quaternionic
    pole = bus.IdealBoundaryPoint(np.zeros(sp.m), np.zeros(sp.k), pole=True)
    ev = bus.BusemannEvaluator(sp, pole)
    p = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], 0.9)
    fd = bus.fd_hessian(sp, p, ev.value_arrays)
    assert np.max(np.abs(fd - bus.hessian_pole(sp))) < 1e-6
    # A-line entry vanishes and there are no cross terms
    H = bus.hessian_pole(sp)
    assert H[-1, -1] == 0.0
    assert np.max(np.abs(H[: sp.m, sp.m:])) == 0.0


def test_translation_equivariance(quaternionic, rng):
    sp = quaternionic
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    p = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], 0.5)
    x = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0], -0.8)
    xinv = sp.inverse(x)

    def translated(U, X, a):
        U2, X2, a2 = sp.multiply_arrays(xinv.U, xinv.X, xinv.a, U, X, a)
        return ev.value_arrays(U2, X2, a2)

    xp = sp.multiply(x, p)
    fd = bus.fd_hessian(sp, xp, translated)
    assert np.max(np.abs(fd - ev.hessian(p))) < 1e-5


def test_busemann_convexity_along_geodesics(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    ev = bus.BusemannEvaluator(sp, bus.boundary_coords(sp, d))
    for _ in range(20):
        base = geo.geodesic_point(sp, random_unit_directions(sp, 1, rng)[0],
                                  rng.uniform(-1, 1))
        u = random_unit_directions(sp, 1, rng)[0]
        ts = np.linspace(-3, 3, 25)
        U, X, a = geo.geodesic_point_arrays(sp, u, ts)
        Us, Xs, As = sp.multiply_arrays(base.U, base.X, base.a, U, X, a)
        vals = ev.value_arrays(Us, Xs, As)
        second = np.diff(vals, 2)
        assert second.min() > -1e-10
