"""Constancy scans, curvature inference, classification, mean-value tests.

A scan evaluates one of eight section statistics over a grid of base
points and offsets and measures the relative spread.  A sphere makes the
tangent-frame statistics point-independent; an elliptic paraboloid does
the same for the vertical-offset volume and the W-normalized area, but
provably not for the W-normalized lateral area.  The mean-value machinery
probes that failure directly through ball averages of the stretch factor.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import (
    DegenerateCurvatureError,
    InvalidParameterError,
    PreconditionError,
)
from .quad import QuadratureConfig, ball_volume, integrate_ball
from .sections import area_star, surface_star, volume_star
from .surface import ConvexSurface, SurfacePoint, point_at

CONDITIONS = ("A", "V", "S", "Vstar", "Astar", "Sstar", "Vss", "Ass")

# conditions whose spread is taken over offsets per point (scaling laws)
_PER_POINT = ("Vss", "Ass")


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("HYPERSECT_THREADS", "1")))
    except ValueError:
        return 1


def _map_cells(fn, cells):
    workers = _max_workers()
    if workers == 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


@dataclass(frozen=True)
class ScanReport:
    condition: str
    points: list  # SurfacePoint
    offsets: list  # magnitudes (t for tangent-frame, k for starred)
    values: np.ndarray  # (n_points, n_offsets)
    rel_errs: np.ndarray
    spread: np.ndarray  # per offset, or per point for scaling-law conditions
    threshold: float
    verdict: str  # "holds" | "fails" | "inconclusive"
    inferred_curvature: np.ndarray | None = None


def _statistic(surface, point, condition, offset, cfg):
    w = point.w
    n = point.n
    if condition == "A":
        val = area_star(surface, point, offset * w, cfg)
        return val.value, val.abs_err_est
    if condition == "V":
        val = volume_star(surface, point, offset * w, cfg)
        return val.value, val.abs_err_est
    if condition == "S":
        val = surface_star(surface, point, offset * w, cfg)
        return val.value, val.abs_err_est
    if condition == "Vstar":
        val = volume_star(surface, point, offset, cfg)
        return val.value, val.abs_err_est
    if condition == "Astar":
        val = area_star(surface, point, offset, cfg)
        return val.value / w, val.abs_err_est / w
    if condition == "Sstar":
        val = surface_star(surface, point, offset, cfg)
        return val.value / w, val.abs_err_est / w
    if condition == "Vss":
        val = volume_star(surface, point, offset * w, cfg)
        norm = offset ** ((n + 2) / 2.0)
        return val.value / norm, val.abs_err_est / norm
    if condition == "Ass":
        val = area_star(surface, point, offset * w, cfg)
        norm = offset ** (n / 2.0)
        return val.value / norm, val.abs_err_est / norm
    raise InvalidParameterError(
        f"condition must be one of {CONDITIONS}, got {condition!r}"
    )


def _rel_spread(vals: np.ndarray) -> float:
    mean = float(np.mean(vals))
    if mean == 0.0:
        return 0.0
    return float((np.max(vals) - np.min(vals)) / abs(mean))


def scan_condition(surface: ConvexSurface, condition: str, points, offsets,
                   cfg: QuadratureConfig | None = None,
                   threshold: float | None = None) -> ScanReport:
    """Evaluate the scan statistic on the (point x offset) grid."""
    pts = [p if isinstance(p, SurfacePoint) else point_at(surface, p)
           for p in points]
    offsets = sorted(float(o) for o in offsets)
    if len(pts) < 3 and condition not in _PER_POINT:
        raise PreconditionError("scan needs at least 3 base points")
    if len(offsets) < 2:
        raise PreconditionError("scan needs at least 2 offsets")

    cells = [(i, j) for i in range(len(pts)) for j in range(len(offsets))]
    results = _map_cells(
        lambda ij: _statistic(surface, pts[ij[0]], condition,
                              offsets[ij[1]], cfg),
        cells,
    )
    values = np.zeros((len(pts), len(offsets)))
    errs = np.zeros_like(values)
    for (i, j), (v, e) in zip(cells, results):
        values[i, j] = v
        errs[i, j] = e

    if threshold is None:
        rel_err = float(np.max(errs / np.maximum(np.abs(values), 1e-300)))
        threshold = max(1e-5, 20.0 * rel_err)

    if condition in _PER_POINT:
        spread = np.array([_rel_spread(values[i, :]) for i in range(len(pts))])
    else:
        spread = np.array([_rel_spread(values[:, j]) for j in range(len(offsets))])

    if np.all(spread <= threshold):
        verdict = "holds"
    elif np.any(spread >= 10.0 * threshold):
        verdict = "fails"
    else:
        verdict = "inconclusive"

    return ScanReport(condition=condition, points=pts, offsets=offsets,
                      values=values, rel_errs=errs, spread=spread,
                      threshold=threshold, verdict=verdict)


@dataclass(frozen=True)
class CurvatureInference:
    limit_constant: np.ndarray  # per-point small-offset constant (alpha or beta)
    k_curv: np.ndarray          # per-point K via the scan's limit formula
    hessian_det: np.ndarray     # K * W^(n+2); constant for a paraboloid


def infer_curvature(scan: ScanReport) -> CurvatureInference:
    """Infer K(p) from a successful (Vstar) or (Astar) scan.

    The small-offset constant is extrapolated per point from the two
    smallest offsets (linear-in-k extrapolation of value / k^power).
    """
    if scan.condition not in ("Vstar", "Astar"):
        raise PreconditionError(
            f"curvature inference needs a Vstar or Astar scan, got {scan.condition}"
        )
    if scan.verdict != "holds":
        raise PreconditionError(
            f"curvature inference needs verdict 'holds', got {scan.verdict!r}"
        )
    n = scan.points[0].n
    wn = ball_volume(n)
    power = (n + 2) / 2.0 if scan.condition == "Vstar" else n / 2.0
    k1, k2 = scan.offsets[0], scan.offsets[1]
    c1 = scan.values[:, 0] / k1 ** power
    c2 = scan.values[:, 1] / k2 ** power
    # extrapolate c(k) linearly to k = 0
    const = c1 + (c1 - c2) * k1 / (k2 - k1)
    w = np.array([p.w for p in scan.points])
    if scan.condition == "Vstar":
        k_curv = 2.0 ** (n + 2) * wn ** 2 / (const ** 2 * (n + 2) ** 2 * w ** (n + 2))
    else:
        k_curv = 2.0 ** n * wn ** 2 / (const ** 2 * w ** (n + 2))
    return CurvatureInference(limit_constant=const, k_curv=k_curv,
                              hessian_det=k_curv * w ** (n + 2))


def default_point_grid(surface: ConvexSurface, count: int = 8,
                       box: float | None = None) -> np.ndarray:
    """Deterministic low-discrepancy base points inside the surface domain."""
    n = surface.n
    if box is None:
        box = (1.0 if not np.isfinite(surface.domain_radius)
               else 0.4 * surface.domain_radius)
    halton = qmc.Halton(d=n, scramble=False)
    pts = (2.0 * halton.random(count + 1)[1:] - 1.0) * box  # drop the origin sample
    if np.isfinite(surface.domain_radius):
        r = np.linalg.norm(pts, axis=1)
        cap = 0.6 * surface.domain_radius
        scale = np.where(r > cap, cap / np.maximum(r, 1e-300), 1.0)
        pts = pts * scale[:, None]
    return pts


def classify(surface: ConvexSurface, count: int = 8,
             box: float | None = None, threshold: float = 1e-6):
    """Constant K => sphere-like, constant det D^2 f => paraboloid-like.

    Applies the classification rules on the sampled grid only; degenerate
    points (non-PD Hessian) are dropped with a warning.
    """
    pts = default_point_grid(surface, count=count, box=box)
    kept = []
    for x in pts:
        p = point_at(surface, x)
        scale = max(1.0, abs(float(np.trace(p.hessian))) ** p.n)
        if p.k_curv <= 1e-12 * scale:
            warnings.warn(f"degenerate point {x} excluded from classification")
            continue
        kept.append(p)
    if not kept:
        raise DegenerateCurvatureError(
            "all sampled points are degenerate; classification inconclusive"
        )
    k_vals = np.array([p.k_curv for p in kept])
    det_vals = np.array([p.k_curv * p.w ** (surface.n + 2) for p in kept])
    k_spread = _rel_spread(k_vals)
    det_spread = _rel_spread(det_vals)
    if k_spread <= threshold:
        verdict = "sphere-like"
    elif det_spread <= threshold:
        verdict = "paraboloid-like"
    else:
        verdict = "neither"
    return {
        "verdict": verdict,
        "k_spread": k_spread,
        "det_spread": det_spread,
        "k_values": k_vals,
        "det_values": det_vals,
        "points": kept,
        "threshold": threshold,
    }


def stretch_integrand(coeffs):
    """V(y) = sqrt(1 + 4 sum a_i^2 y_i^2), the ball-average test integrand."""
    a2 = np.atleast_1d(np.asarray(coeffs, dtype=float)) ** 2

    def v(y):
        y = np.asarray(y, dtype=float)
        return np.sqrt(1.0 + 4.0 * np.sum(a2 * y * y, axis=-1))

    return v


# registry of analytic test functions for the ball-average machinery
TEST_FUNCTIONS = {
    "affine": lambda y: y[..., 0] + 3.0,
    "harmonic-saddle": lambda y: y[..., 0] ** 2 - y[..., 1] ** 2,
    "constant": lambda y: np.ones(np.asarray(y).shape[:-1]),
}


@dataclass(frozen=True)
class MeanValueReport:
    test_fn: str
    centers: list
    radii: list
    ratios: np.ndarray  # (n_centers, n_radii)
    q_spread: np.ndarray  # per radius
    harmonic_verdict: bool
    tolerance: float = 1e-9


def mean_value_scan(coeffs, centers, radii,
                    cfg: QuadratureConfig | None = None,
                    test_fn: str | None = None,
                    tolerance: float = 1e-9) -> MeanValueReport:
    """Ball averages ratio(q, r) = avg_{B_q(r)} V / V(q).

    With the stretch integrand, point-independence of the ratios at each r
    is what the lateral-area constancy condition would force; the q-spread
    per radius exhibits its failure.  Registry functions (e.g. the affine
    one) are harmonic and give ratios identically 1.
    """
    if test_fn is None:
        fn = stretch_integrand(coeffs)
        fn_name = "stretch"
    else:
        fn = TEST_FUNCTIONS.get(test_fn)
        if fn is None:
            raise InvalidParameterError(
                f"unknown test function {test_fn!r}; choices: {sorted(TEST_FUNCTIONS)}"
            )
        fn_name = test_fn
    centers = [np.atleast_1d(np.asarray(q, dtype=float)) for q in centers]
    radii = sorted(float(r) for r in radii)
    if any(r <= 0 for r in radii):
        raise InvalidParameterError("radii must be positive")
    n = centers[0].shape[0]
    wn = ball_volume(n)
    ratios = np.zeros((len(centers), len(radii)))
    for i, q in enumerate(centers):
        vq = float(fn(q[None, :])[0])
        for j, r in enumerate(radii):
            integral = integrate_ball(q, r, fn, cfg, n=n)
            ratios[i, j] = integral.value / (vq * wn * r ** n)
    q_spread = np.array([_rel_spread(ratios[:, j]) for j in range(len(radii))])
    harmonic = bool(np.all(np.abs(ratios - 1.0) <= tolerance))
    return MeanValueReport(test_fn=fn_name, centers=centers, radii=radii,
                           ratios=ratios, q_spread=q_spread,
                           harmonic_verdict=harmonic, tolerance=tolerance)


def u_transform_check(coeffs, sample_points, fd_step: float = 3e-3) -> dict:
    """Verify the second-derivative closed forms of the stretch factor.

    Checks, at each sample y: the diagonal second derivatives of V against
    fourth-order central finite differences, and the combination
    U = (1/4) sum_i V_ii / a_i^2 against ((n-1) V^2 + 1) / V^3.
    Returns the max residuals plus the values at the origin.
    """
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    n = a.shape[0]
    a2 = a * a
    fn = stretch_integrand(a)

    def v_ii_closed(y):
        v = fn(y[None, :])[0]
        return 4.0 * a2 * (v * v - 4.0 * a2 * y * y) / v ** 3

    max_u_resid = 0.0
    max_fd_resid = 0.0
    h = fd_step
    for y in sample_points:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        v = float(fn(y[None, :])[0])
        vii = v_ii_closed(y)
        u = 0.25 * float(np.sum(vii / a2))
        u_pred = ((n - 1) * v * v + 1.0) / v ** 3
        max_u_resid = max(max_u_resid, abs(u - u_pred))
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            stencil = np.stack([y - 2 * e, y - e, y + e, y + 2 * e])
            f4 = fn(stencil)
            fd = (-f4[3] + 16.0 * f4[2] - 30.0 * v + 16.0 * f4[1] - f4[0]) / (12.0 * h * h)
            max_fd_resid = max(max_fd_resid, abs(float(fd) - vii[i]))
    origin = np.zeros(n)
    return {
        "max_u_residual": max_u_resid,
        "max_fd_residual": max_fd_resid,
        "u_at_origin": 0.25 * float(np.sum(v_ii_closed(origin) / a2)),
        "v_at_origin": float(fn(origin[None, :])[0]),
        "dimension": n,
    }
