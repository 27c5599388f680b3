import math

import numpy as np
import pytest

import hypersect as hs
from hypersect.characterize import default_point_grid, stretch_integrand


RING8 = [[0.3 * math.cos(a), 0.3 * math.sin(a)]
         for a in np.linspace(0, 2 * math.pi, 8, endpoint=False)]


@pytest.mark.parametrize("condition", ["A", "V", "S"])
def test_sphere_scans_hold(condition):
    sph = hs.make_sphere_graph(1.0)
    report = hs.scan_condition(sph, condition, RING8, [0.1, 0.2])
    assert report.verdict == "holds"
    assert np.max(report.spread) < 1e-6


def test_paraboloid_vstar_holds():
    par = hs.make_paraboloid([1, 1])
    report = hs.scan_condition(par, "Vstar", [[0, 0], [1, 0], [0, 2], [1, 1]],
                               [0.5, 1.0])
    assert report.verdict == "holds"
    alpha = math.pi / 2
    for j, k in enumerate(report.offsets):
        assert np.allclose(report.values[:, j], alpha * k ** 2, rtol=1e-9)


def test_paraboloid_astar_holds():
    par = hs.make_paraboloid([1, 1])
    report = hs.scan_condition(par, "Astar", [[0, 0], [1, 0], [0, 2], [1, 1]],
                               [0.5, 1.0])
    assert report.verdict == "holds"


def test_paraboloid_sstar_fails():
    par = hs.make_paraboloid([1, 1])
    report = hs.scan_condition(par, "Sstar", [[0, 0], [1, 0], [0, 2]],
                               [0.5, 1.0])
    assert report.verdict == "fails"
    assert report.spread[report.offsets.index(1.0)] >= 1e-3


@pytest.mark.parametrize("condition", ["Vss", "Ass"])
def test_paraboloid_scaling_conditions_hold(condition):
    par = hs.make_paraboloid([1, 2])
    report = hs.scan_condition(par, condition, [[0, 0], [1, 0], [0.5, 0.5]],
                               [0.25, 0.5, 1.0])
    assert report.verdict == "holds"
    assert len(report.spread) == 3  # per point for the scaling laws


def test_scan_preconditions():
    par = hs.make_paraboloid([1, 1])
    with pytest.raises(hs.PreconditionError):
        hs.scan_condition(par, "V", [[0, 0], [1, 0]], [0.5, 1.0])
    with pytest.raises(hs.PreconditionError):
        hs.scan_condition(par, "V", [[0, 0], [1, 0], [0, 1]], [0.5])
    with pytest.raises(hs.InvalidParameterError):
        hs.scan_condition(par, "Q", [[0, 0], [1, 0], [0, 1]], [0.5, 1.0])


def test_infer_curvature_paraboloid():
    par = hs.make_paraboloid([1, 1])
    points = [[0, 0], [1, 0], [0, 2], [1, 1]]
    scan = hs.scan_condition(par, "Vstar", points, [0.5, 1.0])
    inf = hs.infer_curvature(scan)
    assert np.allclose(inf.limit_constant, math.pi / 2, rtol=1e-9)
    for p, k in zip(scan.points, inf.k_curv):
        assert k == pytest.approx(4.0 / p.w ** 4, rel=1e-8)
        assert k == pytest.approx(p.k_curv, rel=1e-8)
    assert np.allclose(inf.hessian_det, 4.0, rtol=1e-8)


def test_infer_curvature_from_astar():
    par = hs.make_paraboloid([1, 2])
    scan = hs.scan_condition(par, "Astar", [[0, 0], [1, 0], [0.5, -0.5]],
                             [0.5, 1.0])
    inf = hs.infer_curvature(scan)
    assert np.allclose(inf.hessian_det, 16.0, rtol=1e-8)


def test_infer_curvature_preconditions():
    par = hs.make_paraboloid([1, 1])
    scan = hs.scan_condition(par, "Sstar", [[0, 0], [1, 0], [0, 2]], [0.5, 1.0])
    with pytest.raises(hs.PreconditionError):
        hs.infer_curvature(scan)
    good = hs.scan_condition(par, "V", RING8[:4], [0.1, 0.2])
    with pytest.raises(hs.PreconditionError):
        hs.infer_curvature(good)


def test_sphere_det_varies_despite_constant_k():
    # constant K but W-dependent Hessian determinant: not a paraboloid
    sph = hs.make_sphere_graph(1.0)
    pts = [hs.point_at(sph, x) for x in ([0, 0], [0.4, 0], [0.3, 0.4])]
    dets = [p.k_curv * p.w ** 4 for p in pts]
    assert (max(dets) - min(dets)) / np.mean(dets) > 0.1


def test_classify_three_cases():
    assert hs.classify(hs.make_sphere_graph(2.0))["verdict"] == "sphere-like"
    assert hs.classify(hs.make_paraboloid([1, 2]))["verdict"] == "paraboloid-like"
    assert hs.classify(hs.make_named("cosh-bowl", 2))["verdict"] == "neither"


def test_classify_sphere_curvature_value():
    result = hs.classify(hs.make_sphere_graph(2.0))
    assert np.allclose(result["k_values"], 0.25, rtol=1e-9)


def test_classify_excludes_degenerate_points():
    quart = hs.make_named("quartic-bowl", 2)
    with pytest.warns(UserWarning):
        # some grid points may be near-degenerate; at least the grid runs
        result = hs.classify(
            hs.make_custom(
                1, lambda x: x[..., 0] ** 4,
                lambda x: 4 * x ** 3,
                lambda x: (12 * x * x)[..., None],
                label="quartic-1d"),
            count=4, box=1e-4)


def test_default_point_grid_deterministic():
    par = hs.make_paraboloid([1, 1])
    a = default_point_grid(par, count=6)
    b = default_point_grid(par, count=6)
    assert np.array_equal(a, b)
    sph = hs.make_sphere_graph(1.0)
    pts = default_point_grid(sph, count=8)
    assert np.all(np.linalg.norm(pts, axis=1) < 1.0)


def test_mean_value_expansion_at_origin():
    report = hs.mean_value_scan([1, 1], [[0, 0]], [0.05, 0.1, 0.2])
    for r, ratio in zip(report.radii, report.ratios[0]):
        assert abs(ratio - (1.0 + r * r)) <= 5 * r ** 4


def test_mean_value_affine_is_harmonic():
    report = hs.mean_value_scan([1, 1], [[0, 0], [2, 0], [0.5, -1.0]],
                                [0.1, 0.5], test_fn="affine")
    assert report.harmonic_verdict
    assert np.max(np.abs(report.ratios - 1.0)) <= 1e-9


def test_mean_value_saddle_is_harmonic():
    report = hs.mean_value_scan([1, 1], [[1.0, 0.5], [2, 1]], [0.2, 0.4],
                                test_fn="harmonic-saddle", tolerance=1e-9)
    # ratios normalize by the center value; harmonic => ball average = center
    assert report.harmonic_verdict


def test_mean_value_q_dependence():
    # the stretch factor is not harmonic: ratios depend on the center
    report = hs.mean_value_scan([1, 1], [[0, 0], [2, 0]], [0.5])
    assert report.q_spread[0] > 1e-3
    assert not report.harmonic_verdict


def test_mean_value_ratio_exceeds_one_at_minimum():
    # strict local minimum of the integrand at the origin
    report = hs.mean_value_scan([1, 1], [[0, 0]], [0.02, 0.05, 0.1])
    assert np.all(report.ratios[0] >= 1.0)


def test_mean_value_ratio_tends_to_one():
    # radii come back sorted ascending; deviation shrinks with r
    report = hs.mean_value_scan([1, 2], [[1.0, -0.5]], [0.2, 0.1, 0.05, 0.025])
    devs = np.abs(report.ratios[0] - 1.0)
    assert devs[0] < devs[-1]
    assert devs[0] < 1e-3


def test_mean_value_validation():
    with pytest.raises(hs.InvalidParameterError):
        hs.mean_value_scan([1, 1], [[0, 0]], [0.1], test_fn="nope")
    with pytest.raises(hs.InvalidParameterError):
        hs.mean_value_scan([1, 1], [[0, 0]], [-0.1])


def test_u_transform_closed_forms():
    uc = hs.u_transform_check([1, 1], [np.zeros(2)])
    assert uc["u_at_origin"] == pytest.approx(2.0, abs=1e-12)
    assert uc["v_at_origin"] == 1.0
    assert uc["max_u_residual"] <= 1e-12

    rng = np.random.default_rng(6)
    samples = [rng.uniform(-2, 2, size=2) for _ in range(25)]
    uc = hs.u_transform_check([1, 3], samples)
    assert uc["max_u_residual"] <= 1e-12
    assert uc["max_fd_residual"] <= 1e-6


def test_u_origin_is_dimension():
    for coeffs in ([1.0], [1, 1], [0.5, 2, 1]):
        uc = hs.u_transform_check(coeffs, [np.zeros(len(coeffs))])
        assert uc["u_at_origin"] == pytest.approx(len(coeffs), abs=1e-12)


def test_stretch_integrand_values():
    v = stretch_integrand([1, 1])
    assert v(np.zeros((1, 2)))[0] == 1.0
    assert v(np.array([[1.0, 0.0]]))[0] == pytest.approx(math.sqrt(5))
