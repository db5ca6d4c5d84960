import numpy as np
import pytest

from drspace import geodesics as geo
from drspace.space import GroupPoint, random_unit_directions


def test_geodesic_at_zero_is_identity(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    p = geo.geodesic_point(sp, d, 0.0)
    assert np.max(np.abs(p.U)) == 0.0 and np.max(np.abs(p.X)) == 0.0
    assert p.a == 1.0


def test_vertical_geodesic(any_space):
    sp = any_space
    for t in (-3.0, 0.5, 30.0):
        p = geo.geodesic_point(sp, sp.a_vector(), t)
        assert np.max(np.abs(p.U)) == 0.0
        assert abs(p.a / np.exp(t) - 1.0) < 1e-14


def test_non_unit_direction_rejected(any_space):
    with pytest.raises(ValueError, match="unit"):
        geo.geodesic_point(any_space, 2.0 * any_space.a_vector(), 1.0)
    with pytest.raises(ValueError, match="unit"):
        geo.geodesic_velocity(any_space, 0.5 * any_space.a_vector(), 1.0)


def test_unit_speed_and_norm_profile(any_space, rng):
    sp = any_space
    ts = np.linspace(-5, 5, 101)
    for d in random_unit_directions(sp, 10, rng):
        vel = geo.geodesic_velocity_arrays(sp, d, ts)
        np.testing.assert_allclose(np.linalg.norm(vel, axis=1), 1.0, atol=1e-12)
        par = geo.params(sp, d)
        Vt = vel[:, : sp.m]
        V0 = d[: sp.m]
        np.testing.assert_allclose(
            np.sum(Vt * Vt, axis=1), np.sum(V0 * V0) * par.h(ts), atol=1e-12
        )
    d = random_unit_directions(sp, 1, rng)[0]
    np.testing.assert_allclose(geo.geodesic_velocity(sp, d, 0.0), d, atol=1e-15)


def test_h_strictly_below_one_off_zero(any_space, rng):
    # the contradiction engine: s = 0 directions have h(t) < 1 for t != 0
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    d[-1] = 0.0
    d /= np.linalg.norm(d)
    par = geo.params(sp, d)
    ts = np.concatenate([np.linspace(-10, -1e-3, 200), np.linspace(1e-3, 10, 200)])
    assert np.all(par.h(ts) < 1.0)
    assert abs(par.h(0.0) - 1.0) < 1e-15


def test_ode_oracle_matches_closed_form(any_space, rng):
    sp = any_space
    dirs = random_unit_directions(sp, 8, rng)
    for t in (1.2, -2.6):
        U, X, a = geo.geodesic_ode_batch(sp, dirs, t, step=1e-3)
        Uc = np.stack([geo.geodesic_point(sp, d, t).U for d in dirs])
        Xc = np.stack([geo.geodesic_point(sp, d, t).X for d in dirs])
        ac = np.array([geo.geodesic_point(sp, d, t).a for d in dirs])
        assert np.max(np.abs(U - Uc)) < 1e-10
        assert np.max(np.abs(X - Xc)) < 1e-10
        assert np.max(np.abs(a - ac)) < 1e-10


def test_ode_convergence_order(quaternionic, rng):
    # halving the step should reduce the error about sixteen-fold; use a
    # coarse base step so truncation dominates round-off
    sp = quaternionic
    d = random_unit_directions(sp, 1, rng)[0]
    target = geo.geodesic_point(sp, d, 2.0)

    def err(step):
        q = geo.geodesic_ode(sp, d, 2.0, step=step)
        return max(np.max(np.abs(q.U - target.U)), np.max(np.abs(q.X - target.X)),
                   abs(q.a - target.a))

    e1, e2 = err(0.1), err(0.05)
    assert 10.0 < e1 / e2 < 22.0


def test_ode_reversal(quaternionic, rng):
    sp = quaternionic
    d = random_unit_directions(sp, 1, rng)[0]
    state = geo.integrate_states(sp, geo.initial_state(sp, d)[None, :], 1.7, 1e-3)
    # flip the velocity and integrate the same elapsed time
    state[0, sp.m + sp.k + 1:] *= -1.0
    back = geo.integrate_states(sp, state, 1.7, 1e-3)
    p = geo.state_to_point(sp, back[0])
    assert np.max(np.abs(p.U)) < 1e-9
    assert np.max(np.abs(p.X)) < 1e-9
    assert abs(p.a - 1.0) < 1e-9


def test_distance_identity_cases(any_space, rng):
    sp = any_space
    assert geo.distance_from_identity(sp, sp.identity()) == 0.0
    for r in (0.3, 2.0, 11.0):
        p = GroupPoint(np.zeros(sp.m), np.zeros(sp.k), np.exp(r))
        assert abs(geo.distance_from_identity(sp, p) - r) < 1e-12
    for d in random_unit_directions(sp, 20, rng):
        t = rng.uniform(-5, 5)
        p = geo.geodesic_point(sp, d, t)
        assert abs(geo.distance_from_identity(sp, p) - abs(t)) < 1e-10


def test_distance_near_identity_guard(quaternionic):
    # lambda dips below 4 only by round-off; must clamp, not produce NaN
    sp = quaternionic
    p = GroupPoint(np.full(sp.m, 1e-9), np.zeros(sp.k), 1.0 + 1e-12)
    d = geo.distance_from_identity(sp, p)
    assert np.isfinite(d) and d < 1e-7


def test_distance_symmetry_triangle(quaternionic, rng):
    sp = quaternionic
    pts = [geo.geodesic_point(sp, d, rng.uniform(-2, 2))
           for d in random_unit_directions(sp, 30, rng)]
    for p, q, r in zip(pts[::3], pts[1::3], pts[2::3]):
        dpq = geo.distance(sp, p, q)
        assert abs(dpq - geo.distance(sp, q, p)) < 1e-10
        assert geo.distance(sp, p, r) <= dpq + geo.distance(sp, q, r) + 1e-10


def test_distance_between_geodesic_points(any_space, rng):
    sp = any_space
    d = random_unit_directions(sp, 1, rng)[0]
    for t1, t2 in [(-2.0, 1.0), (0.5, 3.5), (-4.0, -1.0)]:
        p = geo.geodesic_point(sp, d, t1)
        q = geo.geodesic_point(sp, d, t2)
        assert abs(geo.distance(sp, p, q) - abs(t1 - t2)) < 1e-9


def test_volume_density(any_space):
    sp = any_space
    with pytest.raises(ValueError):
        geo.volume_density(sp, 0.0)
    c2x2, c3x2 = geo.hypergeometric_exponents(sp)
    assert c2x2 == sp.n - 1
    assert c3x2 == 2 * sp.Q - (sp.n - 1)
    # Theta ~ r^{n-1} near zero
    r = 1e-4
    theta, _ = geo.volume_density(sp, r)
    assert abs(theta / r ** (sp.n - 1) - 1.0) < 1e-6
    # sigma -> Q and bounded normalized growth
    _, sigma = geo.volume_density(sp, 30.0)
    assert abs(sigma - sp.Q) < 1e-8
    rs = np.linspace(1.0, 40.0, 200)
    ratio = geo.volume_growth_ratio(sp, rs)
    assert ratio.min() > 0.0
    assert np.isfinite(ratio).all()
