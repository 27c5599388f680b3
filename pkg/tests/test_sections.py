import math

import numpy as np
import pytest

import hypersect as hs
from hypersect.quad import QuadratureConfig
from hypersect.sections import excess_term


def test_area_star_paraboloid_vertex():
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [0, 0])
    assert hs.area_star(par, p, 1.0).value == pytest.approx(math.pi, rel=1e-10)


def test_area_star_picks_up_w_factor():
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [1, 0])
    val = hs.area_star(par, p, 1.0)
    assert val.value == pytest.approx(math.sqrt(5) * math.pi, rel=1e-10)


def test_area_star_small_k_limit():
    bowl = hs.make_named("exp-bowl", 2)
    p = hs.point_at(bowl, [0.3, 0.1])
    assert hs.area_star(bowl, p, 1e-6).value == pytest.approx(0.0, abs=1e-4)


def test_volume_star_point_independent():
    par = hs.make_paraboloid([1, 1])
    for x in ([0, 0], [1, 0]):
        p = hs.point_at(par, x)
        assert hs.volume_star(par, p, 1.0).value == pytest.approx(
            math.pi / 2, rel=1e-10)


def test_sphere_cap_volume():
    # cap volume pi t^2 (a - t/3), cross-checked by rejection MC in 3-D
    sph = hs.make_sphere_graph(1.0)
    p = hs.point_at(sph, [0, 0])
    t = 0.5
    exact = math.pi * t * t * (1.0 - t / 3.0)
    assert exact == pytest.approx(5 * math.pi / 24)
    val = hs.volume_star(sph, p, t)  # W = 1 at the pole
    assert val.value == pytest.approx(exact, rel=1e-10)

    rng = np.random.default_rng(0)
    pts = rng.uniform([-1, -1, 0], [1, 1, t], size=(400_000, 3))
    inside = (1.0 - np.sqrt(np.clip(1 - pts[:, 0] ** 2 - pts[:, 1] ** 2, 0, None))
              < pts[:, 2]) & (pts[:, 0] ** 2 + pts[:, 1] ** 2 < 1)
    mc = np.mean(inside) * 4.0 * t
    assert val.value == pytest.approx(mc, rel=2e-2)


def test_surface_star_archimedes():
    sph = hs.make_sphere_graph(1.0)
    p = hs.point_at(sph, [0, 0])
    assert hs.surface_star(sph, p, 0.5).value == pytest.approx(math.pi, rel=1e-10)


def test_surface_star_near_flat_limit():
    # over a shrinking region the integrand is ~W(p): s* -> W(p) * |D|
    bowl = hs.make_named("cosh-bowl", 2)
    p = hs.point_at(bowl, [0.8, -0.2])
    k = 1e-5
    s = hs.surface_star(bowl, p, k).value
    a_flat = hs.area_star(bowl, p, k).value / p.w  # projection area
    assert s == pytest.approx(p.w * a_flat, rel=1e-4)


def test_surface_star_excess_scaling():
    # s* - a* = O(k^2) at the paraboloid vertex
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [0, 0])
    gaps = []
    for k in (0.2, 0.1, 0.05):
        s = hs.surface_star(par, p, k).value
        a = hs.area_star(par, p, k).value
        gaps.append(s - a)
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.15)
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.15)


def test_local_frame_measures_sphere():
    sph = hs.make_sphere_graph(1.0)
    p = hs.point_at(sph, [0, 0])
    t = 0.5
    m = hs.local_frame_measures(sph, p, t)
    assert m.a_loc.value == pytest.approx(math.pi * (2 * 1 * t - t * t), rel=1e-10)
    assert m.s_loc.value == pytest.approx(2 * math.pi * t, rel=1e-10)
    assert m.v_star.value == m.v_loc.value
    assert m.s_star.value == m.s_loc.value


def test_local_frame_volume_via_conversion():
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [1, 0])
    t = 1.0 / math.sqrt(5)  # k = t W = 1
    m = hs.local_frame_measures(par, p, t)
    assert m.v_loc.value == pytest.approx(math.pi / 2, rel=1e-9)


def test_measures_vanish_as_offset_to_zero():
    par = hs.make_paraboloid([1, 2])
    p = hs.point_at(par, [0.5, 0.5])
    m = hs.local_frame_measures(par, p, 1e-7)
    for field in ("a_loc", "v_loc", "s_loc", "n_loc"):
        assert abs(getattr(m, field).value) < 1e-3


def test_monotone_in_offset():
    bowl = hs.make_named("exp-bowl", 2)
    p = hs.point_at(bowl, [0.2, 0.6])
    prev = (0.0, 0.0, 0.0)
    for k in (0.2, 0.5, 1.0):
        a = hs.area_star(bowl, p, k).value
        v = hs.volume_star(bowl, p, k).value
        s = hs.surface_star(bowl, p, k).value
        assert (a, v, s) > prev
        prev = (a, v, s)


def test_decomposition_identity():
    # s = a + n with n recomputed as an independent integral; n >= 0
    for surface, x in ((hs.make_paraboloid([1, 2]), [0.7, -0.4]),
                       (hs.make_sphere_graph(2.0), [0.4, 0.3]),
                       (hs.make_named("cosh-bowl", 2), [0.0, 0.0])):
        p = hs.point_at(surface, x)
        m = hs.section_measures(surface, p, hs.vertical_offset(0.5))
        combined_err = (m.s_loc.abs_err_est + m.a_loc.abs_err_est
                        + m.n_loc.abs_err_est + 1e-12)
        assert abs(m.s_loc.value - m.a_loc.value - m.n_loc.value) <= combined_err
        assert m.n_loc.value >= -combined_err


def test_excess_equals_rotated_integrand_at_vertex():
    # at a vertex the frames coincide: the excess integrand is W - 1 exactly
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [0, 0])
    region = hs.build_region(par, p, hs.vertical_offset(0.5))
    direct = hs.integrate_region(
        region, lambda u: par.w_at(p.x0 + u) - 1.0)
    via_measures = excess_term(par, p, 0.5)
    assert direct.value == pytest.approx(via_measures.value, rel=1e-12)


def test_paraboloid_power_scaling():
    par = hs.make_paraboloid([1, 2])
    p = hs.point_at(par, [1.0, 0.5])
    v1 = hs.volume_star(par, p, 1.0).value
    a1 = hs.area_star(par, p, 1.0).value
    for k in (0.25, 0.5, 2.0):
        assert hs.volume_star(par, p, k).value == pytest.approx(
            v1 * k ** 2, rel=1e-8)
        assert hs.area_star(par, p, k).value == pytest.approx(
            a1 * k, rel=1e-8)


def test_frame_independence():
    bowl = hs.make_named("cosh-bowl", 2)
    p = hs.point_at(bowl, [0.5, 0.3])
    k = 0.6
    v_vertical = hs.volume_star(bowl, p, k).value
    m = hs.local_frame_measures(bowl, p, k / p.w)
    assert v_vertical == pytest.approx(m.v_loc.value, rel=1e-10)


def test_dv_dt_paraboloid_vertex():
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [0, 0])
    dv, a = hs.dV_dt_check(par, p, 1.0, 1e-3)
    assert a == pytest.approx(math.pi, rel=1e-9)
    assert dv == pytest.approx(math.pi, rel=1e-5)


def test_dv_dt_sphere():
    sph = hs.make_sphere_graph(1.0)
    p = hs.point_at(sph, [0, 0])
    dv, a = hs.dV_dt_check(sph, p, 0.5, 1e-4)
    assert a == pytest.approx(0.75 * math.pi, rel=1e-9)
    assert dv == pytest.approx(a, rel=1e-5)


def test_dv_dt_random_cells_property():
    rng = np.random.default_rng(8)
    surfaces = [hs.make_paraboloid([1, 2]), hs.make_named("exp-bowl", 2)]
    for _ in range(5):
        surface = surfaces[rng.integers(len(surfaces))]
        p = hs.point_at(surface, rng.uniform(-0.8, 0.8, size=2))
        t = rng.uniform(0.2, 0.8)
        h = 1e-4 * t
        dv, a = hs.dV_dt_check(surface, p, t, h)
        assert dv == pytest.approx(a, rel=1e-5)


def test_dv_dt_step_precondition():
    par = hs.make_paraboloid([1, 1])
    p = hs.point_at(par, [0, 0])
    with pytest.raises(hs.InvalidParameterError):
        hs.dV_dt_check(par, p, 0.1, 0.05)


def test_degenerate_point_sections_still_work():
    # K(p) = 0 at the quartic vertex; plain integrals remain well-defined
    quart = hs.make_named("quartic-bowl", 2)
    p = hs.point_at(quart, [0, 0])
    assert p.k_curv == 0.0
    a = hs.area_star(quart, p, 1.0)
    # region is {u1^4 + u2^4 < 1}; area = Gamma(1/4)^2 / (2 sqrt(pi))
    from scipy.special import gamma
    exact = gamma(1.25) ** 2 * 4 / gamma(1.5)
    assert a.value == pytest.approx(exact, rel=1e-8)
