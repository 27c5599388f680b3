"""Section functionals of a convex graph hypersurface.

For a base point p and a cutting plane parallel to the tangent plane, the
starred quantities are parameterized by the vertical rise k and computed
over the horizontal projection D of the section:

  area:    a* = W(p) * |D|        (flat area inside the tilted plane;
                                   1/W is the cosine between the plane
                                   and the horizontal)
  volume:  v* = int_D (k - g) du  (solid between surface and plane)
  surface: s* = int_D W(x0+u) du  (lateral area of the surface patch)

The tangent-frame quantities at perpendicular distance t are the same
numbers evaluated at k = t * W(p).  The correction term n = s - a is also
recomputed as the independent integral int_D (W(x0+u) - W(p)) du.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .quad import IntegralValue, QuadratureConfig, integrate_region
from .region import (
    SectionRegion,
    SectionSpec,
    build_region,
    vertical_offset,
)
from .surface import ConvexSurface, SurfacePoint


@dataclass(frozen=True)
class SectionMeasure:
    """All section functionals at one (point, offset) cell."""

    point: SurfacePoint
    spec: SectionSpec
    a_star: IntegralValue
    v_star: IntegralValue
    s_star: IntegralValue
    a_loc: IntegralValue
    v_loc: IntegralValue
    s_loc: IntegralValue
    n_loc: IntegralValue


def _section_region(surface: ConvexSurface, point: SurfacePoint,
                    k: float) -> SectionRegion:
    if k <= 0:
        raise InvalidParameterError(f"vertical offset k must be positive, got {k}")
    return build_region(surface, point, vertical_offset(k))


def area_star(surface: ConvexSurface, point: SurfacePoint, k: float,
              cfg: QuadratureConfig | None = None) -> IntegralValue:
    """Flat area of the planar section: W(p) times the projection area."""
    region = _section_region(surface, point, k)
    one = lambda u: np.ones(u.shape[0])
    flat = integrate_region(region, one, cfg)
    return IntegralValue(value=point.w * flat.value,
                         abs_err_est=point.w * flat.abs_err_est,
                         method=flat.method, evaluations=flat.evaluations)


def volume_star(surface: ConvexSurface, point: SurfacePoint, k: float,
                cfg: QuadratureConfig | None = None) -> IntegralValue:
    """Volume of the solid between the surface and the cutting plane."""
    region = _section_region(surface, point, k)
    return integrate_region(region, lambda u: k - region.gauge(u), cfg)


def surface_star(surface: ConvexSurface, point: SurfacePoint, k: float,
                 cfg: QuadratureConfig | None = None) -> IntegralValue:
    """Lateral surface area of the patch of the graph over the section region."""
    region = _section_region(surface, point, k)
    return integrate_region(
        region, lambda u: surface.w_at(point.x0 + u), cfg)


def excess_term(surface: ConvexSurface, point: SurfacePoint, k: float,
                cfg: QuadratureConfig | None = None) -> IntegralValue:
    """The surface-area excess over the flat section, as a direct integral.

    Equals s - a because s - a = int_D (W(x) - W(p)) du; at a vertex
    (grad f(x0) = 0) this is exactly the excess integrand sqrt(1+|grad f|^2) - 1.
    """
    region = _section_region(surface, point, k)
    w0 = point.w
    return integrate_region(
        region, lambda u: surface.w_at(point.x0 + u) - w0, cfg)


def section_measures(surface: ConvexSurface, point: SurfacePoint,
                     spec: SectionSpec,
                     cfg: QuadratureConfig | None = None) -> SectionMeasure:
    """Compute all starred and tangent-frame functionals for one cell."""
    from .region import vertical_level

    k = vertical_level(point, spec)
    a = area_star(surface, point, k, cfg)
    v = volume_star(surface, point, k, cfg)
    s = surface_star(surface, point, k, cfg)
    n = excess_term(surface, point, k, cfg)
    # the tangent-frame quantities are the same sets evaluated at k = t W(p)
    return SectionMeasure(point=point, spec=spec, a_star=a, v_star=v,
                          s_star=s, a_loc=a, v_loc=v, s_loc=s, n_loc=n)


def local_frame_measures(surface: ConvexSurface, point: SurfacePoint,
                         t: float,
                         cfg: QuadratureConfig | None = None) -> SectionMeasure:
    """Tangent-frame functionals at perpendicular distance t (via k = t W)."""
    from .region import normal_offset

    if t <= 0:
        raise InvalidParameterError(f"offset t must be positive, got {t}")
    return section_measures(surface, point, normal_offset(t), cfg)


def dV_dt_check(surface: ConvexSurface, point: SurfacePoint, t: float,
                h: float, cfg: QuadratureConfig | None = None):
    """Central difference of V against A at the same t.

    Returns (dV/dt estimate, A(t)); the caller asserts closeness.
    """
    if not 0 < h < t / 4:
        raise InvalidParameterError(f"need 0 < h < t/4, got h={h}, t={t}")
    w = point.w
    v_plus = volume_star(surface, point, (t + h) * w, cfg).value
    v_minus = volume_star(surface, point, (t - h) * w, cfg).value
    a = area_star(surface, point, t * w, cfg).value
    return (v_plus - v_minus) / (2.0 * h), a
