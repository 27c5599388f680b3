"""Section regions cut off by hyperplanes parallel to a tangent plane.

The region is described in tangent-shifted coordinates u = x - x0.  Its
gauge g(u) = f(x0 + u) - f(x0) - grad f(x0) . u measures vertical height
above the tangent plane, so the region {g < k} is convex and star-shaped
about 0 and its boundary is found by a monotone root solve along rays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvexityViolationError,
    InvalidParameterError,
    RegionUnboundedError,
)
from .surface import ConvexSurface, SurfacePoint

# Bracketing for the boundary solve: initial step scale, doubling cap.
_BRACKET_DOUBLINGS = 40
_DOMAIN_MARGIN = 1e-9


class OffsetMode(enum.Enum):
    NORMAL = "normal"      # t: perpendicular distance from the tangent plane
    VERTICAL = "vertical"  # k: vertical rise along the z-axis


@dataclass(frozen=True)
class SectionSpec:
    """Cutting-plane description: mode plus positive magnitude."""

    mode: OffsetMode
    magnitude: float

    def __post_init__(self):
        if not self.magnitude > 0:
            raise InvalidParameterError(
                f"section magnitude must be positive, got {self.magnitude}"
            )


def normal_offset(t: float) -> SectionSpec:
    return SectionSpec(OffsetMode.NORMAL, float(t))


def vertical_offset(k: float) -> SectionSpec:
    return SectionSpec(OffsetMode.VERTICAL, float(k))


def spec_convert(point: SurfacePoint, spec: SectionSpec) -> SectionSpec:
    """Switch between the two parameterizations via k = t * W(p); involutive."""
    if spec.mode is OffsetMode.NORMAL:
        return SectionSpec(OffsetMode.VERTICAL, spec.magnitude * point.w)
    return SectionSpec(OffsetMode.NORMAL, spec.magnitude / point.w)


def vertical_level(point: SurfacePoint, spec: SectionSpec) -> float:
    if spec.mode is OffsetMode.VERTICAL:
        return spec.magnitude
    return spec.magnitude * point.w


@dataclass(frozen=True)
class SectionRegion:
    """The convex region {u : g(u) < level} in tangent-shifted coordinates."""

    surface: ConvexSurface
    base: SurfacePoint
    spec: SectionSpec
    level: float
    bounded: bool

    @property
    def n(self) -> int:
        return self.surface.n

    def gauge(self, u) -> np.ndarray:
        """Height above the tangent plane at x0 + u (vectorized over rows)."""
        u = np.asarray(u, dtype=float)
        x = self.base.x0 + u
        g = (self.surface.f_at(x) - self.base.height
             - u @ self.base.gradient)
        bad = np.min(g) if np.ndim(g) else float(g)
        if bad < -1e-9:
            raise ConvexityViolationError(
                f"gauge negative ({bad:.3g}): surface not convex near {self.base.x0}"
            )
        return g

    def max_ray_length(self, v: np.ndarray) -> float:
        """Largest step from x0 along v that stays inside the domain ball."""
        R = self.surface.domain_radius
        if not np.isfinite(R):
            return math.inf
        b = float(self.base.x0 @ v)
        c = float(self.base.x0 @ self.base.x0) - R * R
        return (-b + math.sqrt(b * b - c)) * (1.0 - _DOMAIN_MARGIN)

    def boundary_radius(self, v) -> float:
        """Polar boundary r with g(r v) = level, by bracketing + bisection."""
        r = boundary_radii(self, np.asarray(v, dtype=float)[None, :])
        return float(r[0])


def build_region(surface: ConvexSurface, point: SurfacePoint,
                 spec: SectionSpec) -> SectionRegion:
    """Construct the section region; probes boundedness along axis directions."""
    level = vertical_level(point, spec)
    region = SectionRegion(surface=surface, base=point, spec=spec,
                           level=level, bounded=True)
    # Probe: a failed solve along any axis direction means unbounded.
    probes = np.concatenate([np.eye(surface.n), -np.eye(surface.n)])
    boundary_radii(region, probes)
    return region


def boundary_radii(region: SectionRegion, dirs: np.ndarray) -> np.ndarray:
    """Vectorized boundary solve for a (m, n) array of unit directions.

    Exponential bracketing followed by bisection; g is nondecreasing along
    rays from 0 for convex g with g(0) = 0, so the root is unique for
    strictly convex gauges (the smallest root is returned on flat pieces).
    """
    m = dirs.shape[0]
    level = region.level
    rmax = np.array([region.max_ray_length(v) for v in dirs])
    start = min(1.0, (region.surface.domain_radius / 2
                      if np.isfinite(region.surface.domain_radius) else 1.0))
    lo = np.zeros(m)
    hi = np.full(m, start * 2.0 ** -10)
    capped = np.minimum(hi, rmax)
    found = region.gauge(capped[:, None] * dirs) >= level
    hi = capped
    for _ in range(_BRACKET_DOUBLINGS):
        if np.all(found):
            break
        grow = ~found
        lo[grow] = hi[grow]
        hi[grow] = np.minimum(hi[grow] * 2.0, rmax[grow])
        at_cap = grow & (hi <= lo * (1 + 1e-15))
        if np.any(at_cap):
            raise RegionUnboundedError(
                f"section at level {level:.6g} escapes the surface domain"
            )
        g = region.gauge(hi[grow, None] * dirs[grow])
        found[grow] = g >= level
    if not np.all(found):
        raise RegionUnboundedError(
            f"no bracket for section boundary at level {level:.6g} "
            f"within {_BRACKET_DOUBLINGS} doublings"
        )
    # Bisection to ~machine precision in r; tolerance checked on g below.
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        g = region.gauge(mid[:, None] * dirs)
        below = g < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) <= 1e-16 * np.max(hi):
            break
    return 0.5 * (lo + hi)
