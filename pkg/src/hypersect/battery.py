"""The acceptance battery behind the `suite` CLI subcommand.

Each criterion function returns a dict with a boolean "passed" plus the
measured numbers, so the CLI can tabulate them and the test suite can
assert on them.  All checks are deterministic at the default quadrature
settings and run at desk scale (n <= 3, seconds each).
"""

from __future__ import annotations

import math

import numpy as np

from .asymptotics import (
    LadderConfig,
    cap_oracle_paraboloid,
    cap_oracle_sphere,
    lemma8_estimate,
)
from .characterize import (
    classify,
    infer_curvature,
    mean_value_scan,
    scan_condition,
    u_transform_check,
)
from .quad import QuadratureConfig, integrate_region, mc_integrate_region
from .region import build_region, vertical_offset
from .sections import area_star, dV_dt_check, excess_term, surface_star, volume_star
from .surface import (
    make_named,
    make_paraboloid,
    make_sphere_graph,
    point_at,
)


def _ring_points(radius: float, count: int) -> list:
    ang = 2.0 * math.pi * np.arange(count) / count
    return [np.array([radius * math.cos(a), radius * math.sin(a)]) for a in ang]


def criterion_archimedes(cfg: QuadratureConfig | None = None) -> dict:
    """Sphere a=1, n=2: lateral cap area equals 2 pi a t at every cell."""
    sphere = make_sphere_graph(1.0)
    cells = []
    worst = 0.0
    for x in _ring_points(0.3, 8):
        p = point_at(sphere, x)
        for t in (0.1, 0.25, 0.5):
            s = surface_star(sphere, p, t * p.w, cfg).value
            exact = 2.0 * math.pi * 1.0 * t
            rel = abs(s - exact) / exact
            worst = max(worst, rel)
            cells.append({"point": x.tolist(), "t": t, "s_loc": s, "rel_err": rel})
    return {"name": "archimedes-identity", "passed": worst <= 1e-6,
            "max_rel_err": worst, "tolerance": 1e-6, "cells": cells}


def criterion_lemma8_limits(cfg: QuadratureConfig | None = None) -> dict:
    """Extrapolated small-offset limits match the curvature closed forms."""
    grids = [
        (make_paraboloid([1, 1]), [[0, 0], [1, 0], [0.5, -0.5]]),
        (make_sphere_graph(1.0), [[0, 0], [0.2, 0.1], [-0.3, 0.2]]),
    ]
    worst = 0.0
    rows = []
    for surface, points in grids:
        for x in points:
            p = point_at(surface, x)
            for q in ("A", "V", "S"):
                est = lemma8_estimate(surface, p, q, LadderConfig(t0=0.05), cfg)
                worst = max(worst, est.rel_dev)
                rows.append({"surface": surface.label, "point": list(x),
                             "quantity": q, "rel_dev": est.rel_dev})
    return {"name": "lemma8-limits", "passed": worst <= 1e-3,
            "max_rel_dev": worst, "tolerance": 1e-3, "rows": rows}


def _builtin_cells(rng, count):
    surfaces = [
        (make_paraboloid([1, 1]), 1.2, 0.8),
        (make_paraboloid([1, 2]), 1.0, 0.6),
        (make_sphere_graph(1.0), 0.25, 0.2),
        (make_sphere_graph(2.0), 0.5, 0.4),
        (make_named("cosh-bowl", 2), 1.0, 0.5),
        (make_named("exp-bowl", 2), 1.0, 0.5),
    ]
    cells = []
    for _ in range(count):
        surface, box, tmax = surfaces[rng.integers(len(surfaces))]
        x = rng.uniform(-box, box, size=surface.n)
        t = rng.uniform(0.2 * tmax, tmax)
        cells.append((surface, x, t))
    return cells


def criterion_derivative_identity(cfg: QuadratureConfig | None = None) -> dict:
    """Central difference of the cap volume reproduces the section area."""
    rng = np.random.default_rng(20260823)
    h = 1e-4
    worst = 0.0
    rows = []
    for surface, x, t in _builtin_cells(rng, 12):
        p = point_at(surface, x)
        dv, a = dV_dt_check(surface, p, t, h, cfg)
        rel = abs(dv - a) / abs(a)
        worst = max(worst, rel)
        rows.append({"surface": surface.label, "point": x.tolist(), "t": t,
                     "dV_dt": dv, "A": a, "rel_err": rel})
    return {"name": "derivative-identity", "passed": worst <= 1e-4,
            "max_rel_err": worst, "tolerance": 1e-4, "rows": rows}


def criterion_paraboloid_closed_forms(cfg: QuadratureConfig | None = None) -> dict:
    """Quadrature reproduces the paraboloid volume/area closed forms."""
    worst = 0.0
    rows = []
    for coeffs in ([1, 1], [1, 2]):
        surface = make_paraboloid(coeffs)
        for x in ([0, 0], [1, 0]):
            p = point_at(surface, x)
            for k in (0.5, 1.0):
                v = volume_star(surface, p, k, cfg).value
                a = area_star(surface, p, k, cfg).value
                v_exact = cap_oracle_paraboloid(coeffs, p, k, "V")
                a_exact = cap_oracle_paraboloid(coeffs, p, k, "A")
                rel = max(abs(v - v_exact) / v_exact, abs(a - a_exact) / a_exact)
                worst = max(worst, rel)
                rows.append({"coeffs": list(coeffs), "point": list(x), "k": k,
                             "rel_err": rel})
    return {"name": "paraboloid-closed-forms", "passed": worst <= 1e-7,
            "max_rel_err": worst, "tolerance": 1e-7, "rows": rows}


def criterion_theorem5_scans(cfg: QuadratureConfig | None = None) -> dict:
    """(Vstar) and (Astar) hold on the paraboloid; inferred det is 4."""
    surface = make_paraboloid([1, 1])
    points = [[0, 0], [1, 0], [0, 2], [1, 1]]
    offsets = [0.5, 1.0]
    out = {"name": "theorem5-forward-scans", "scans": {}}
    passed = True
    for cond in ("Vstar", "Astar"):
        scan = scan_condition(surface, cond, points, offsets, cfg)
        spread = float(np.max(scan.spread))
        ok = scan.verdict == "holds" and spread <= 1e-6
        det_dev = math.nan
        if scan.verdict == "holds":
            inf = infer_curvature(scan)
            det_dev = float(np.max(np.abs(inf.hessian_det - 4.0)) / 4.0)
            ok = ok and det_dev <= 1e-4
        passed = passed and ok
        out["scans"][cond] = {"verdict": scan.verdict, "max_spread": spread,
                              "det_rel_dev": det_dev}
    out["passed"] = passed
    out["tolerance"] = {"spread": 1e-6, "det": 1e-4}
    return out


def criterion_theorem7_scan(cfg: QuadratureConfig | None = None) -> dict:
    """(Sstar) fails on the paraboloid with a recorded margin."""
    surface = make_paraboloid([1, 1])
    scan = scan_condition(surface, "Sstar", [[0, 0], [1, 0], [0, 2]],
                          [0.5, 1.0], cfg)
    spread_at_1 = float(scan.spread[scan.offsets.index(1.0)])
    return {"name": "theorem7-sstar-fails",
            "passed": scan.verdict == "fails" and spread_at_1 >= 1e-3,
            "verdict": scan.verdict, "spread_at_k1": spread_at_1,
            "threshold": scan.threshold}


def criterion_mean_value(cfg: QuadratureConfig | None = None) -> dict:
    """Ball-average expansion, harmonic test function, stretch-factor identities."""
    radii = [0.05, 0.1, 0.2]
    mv = mean_value_scan([1, 1], [[0, 0]], radii, cfg)
    exp_ok = True
    expansion = []
    for r, ratio in zip(mv.radii, mv.ratios[0]):
        dev = abs(ratio - (1.0 + r * r))
        exp_ok = exp_ok and dev <= 5.0 * r ** 4
        expansion.append({"r": r, "ratio": float(ratio), "dev": dev,
                          "bound": 5.0 * r ** 4})
    affine = mean_value_scan([1, 1], [[0, 0], [2, 0], [0.5, -0.5]],
                             [0.1, 0.3], cfg, test_fn="affine")
    affine_dev = float(np.max(np.abs(affine.ratios - 1.0)))
    rng = np.random.default_rng(7)
    samples = [rng.uniform(-2, 2, size=2) for _ in range(20)]
    uc = u_transform_check([1, 1], samples)
    u0_dev = abs(uc["u_at_origin"] - 2.0)
    passed = (exp_ok and affine_dev <= 1e-9
              and uc["max_u_residual"] <= 1e-6
              and uc["max_fd_residual"] <= 1e-6
              and u0_dev <= 1e-12)
    return {"name": "mean-value-machinery", "passed": passed,
            "expansion": expansion, "affine_max_dev": affine_dev,
            "u_residual": uc["max_u_residual"],
            "fd_residual": uc["max_fd_residual"], "u0_dev": u0_dev}


def criterion_remainder_vanishing(cfg: QuadratureConfig | None = None) -> dict:
    """Excess/area ratio decreases down the offset ladder at a vertex.

    Uses the a = (1/2, 1/2) paraboloid, whose excess ratio ~ t/4 clears
    the 1e-2 end bound on the stated six-rung ladder.
    """
    surface = make_paraboloid([0.5, 0.5])
    p = point_at(surface, [0, 0])
    ratios = []
    for j in range(6):
        t = 0.5 * 2.0 ** -j
        k = t * p.w
        n_val = excess_term(surface, p, k, cfg).value
        a_val = area_star(surface, p, k, cfg).value
        ratios.append(n_val / a_val)  # both normalized by t^(n/2), factor cancels
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    return {"name": "remainder-vanishing",
            "passed": decreasing and ratios[-1] < 1e-2,
            "ratios": ratios, "end_bound": 1e-2}


def criterion_classification(cfg: QuadratureConfig | None = None) -> dict:
    """Grid classification of the three reference surfaces."""
    expected = {
        "sphere": (make_sphere_graph(2.0), "sphere-like"),
        "paraboloid": (make_paraboloid([1, 2]), "paraboloid-like"),
        "cosh-bowl": (make_named("cosh-bowl", 2), "neither"),
    }
    results = {}
    passed = True
    for name, (surface, want) in expected.items():
        got = classify(surface)["verdict"]
        results[name] = {"expected": want, "got": got}
        passed = passed and got == want
    return {"name": "classification", "passed": passed, "results": results}


def criterion_mc_cross_check(cfg: QuadratureConfig | None = None) -> dict:
    """Deterministic and Monte Carlo integrals agree within 3 combined sigma."""
    cfg = cfg or QuadratureConfig()
    grid = [
        (make_paraboloid([1, 1]), [1, 0], 1.0),
        (make_paraboloid([1, 2]), [0, 0], 0.5),
        (make_sphere_graph(1.0), [0.2, 0.1], 0.3),
        (make_named("cosh-bowl", 2), [0.5, -0.5], 0.8),
    ]
    rows = []
    passed = True
    for surface, x, k in grid:
        p = point_at(surface, x)
        region = build_region(surface, p, vertical_offset(k))
        integrand = lambda u: surface.w_at(p.x0 + u)
        det = integrate_region(region, integrand, cfg)
        mc = mc_integrate_region(region, integrand, cfg)
        gap = abs(det.value - mc.value)
        bound = 3.0 * (det.abs_err_est + mc.abs_err_est)
        ok = gap <= bound
        passed = passed and ok
        rows.append({"surface": surface.label, "point": list(x), "k": k,
                     "deterministic": det.value, "monte_carlo": mc.value,
                     "gap": gap, "bound": bound, "ok": ok})
    return {"name": "mc-cross-check", "passed": passed, "rows": rows}


ALL_CRITERIA = [
    criterion_archimedes,
    criterion_lemma8_limits,
    criterion_derivative_identity,
    criterion_paraboloid_closed_forms,
    criterion_theorem5_scans,
    criterion_theorem7_scan,
    criterion_mean_value,
    criterion_remainder_vanishing,
    criterion_classification,
    criterion_mc_cross_check,
]


def run_battery(cfg: QuadratureConfig | None = None) -> dict:
    """Run every criterion; returns a summary dict for serialization."""
    results = [fn(cfg) for fn in ALL_CRITERIA]
    return {
        "criteria": results,
        "passed": all(r["passed"] for r in results),
        "n_passed": sum(r["passed"] for r in results),
        "n_total": len(results),
    }
