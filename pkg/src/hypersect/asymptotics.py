"""Small-offset limits of the section functionals and closed-form oracles.

At a point of positive Gauss-Kronecker curvature K the normalized
functionals converge as the offset t -> 0:

  A(t) / t^(n/2)     ->  (sqrt 2)^n     omega_n / sqrt K
  V(t) / t^((n+2)/2) ->  (sqrt 2)^(n+2) omega_n / ((n+2) sqrt K)
  S(t) / t^(n/2)     ->  (sqrt 2)^n     omega_n / sqrt K

The limit estimator evaluates the normalized quantity on a geometric
ladder and extrapolates with a least-squares fit c0 + c1 sqrt(t) + c2 t;
the sqrt(t) term absorbs the leading rescaling correction.  Closed forms
for sphere caps and elliptic paraboloids serve as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad as _quad1d

from .errors import (
    DegenerateCurvatureError,
    DomainError,
    InvalidParameterError,
    RegionUnboundedError,
)
from .quad import QuadratureConfig, ball_volume, sphere_area
from .sections import area_star, surface_star, volume_star
from .surface import ConvexSurface, SurfacePoint

_K_FLOOR = 1e-12


@dataclass(frozen=True)
class LadderConfig:
    t0: float = 0.1
    ratio: float = 0.5
    rungs: int = 6
    max_shrinks: int = 8

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise InvalidParameterError("ladder ratio must lie in (0, 1)")
        if self.rungs < 4:
            raise InvalidParameterError("ladder needs at least 4 rungs")


@dataclass(frozen=True)
class LimitEstimate:
    quantity: str  # "A" | "V" | "S"
    extrapolated: float
    uncertainty: float
    ladder: list = field(default_factory=list)  # (t, normalized value) pairs
    predicted: float = math.nan
    rel_dev: float = math.nan


def _require_positive_curvature(point: SurfacePoint) -> float:
    scale = max(1.0, float(np.max(np.abs(point.hessian))) ** point.n)
    if point.k_curv <= _K_FLOOR * scale:
        raise DegenerateCurvatureError(
            f"Gauss-Kronecker curvature {point.k_curv:.3g} is degenerate at "
            f"{point.x0}; the limit formulas require K > 0"
        )
    return point.k_curv


def lemma8_predicted(point: SurfacePoint, quantity: str) -> float:
    """Closed-form limit value of the normalized functional at this point."""
    k_curv = _require_positive_curvature(point)
    n = point.n
    wn = ball_volume(n)
    if quantity in ("A", "S"):
        return math.sqrt(2.0) ** n * wn / math.sqrt(k_curv)
    if quantity == "V":
        return math.sqrt(2.0) ** (n + 2) * wn / ((n + 2) * math.sqrt(k_curv))
    raise InvalidParameterError(f"quantity must be A, V or S, got {quantity!r}")


def _normalized_value(surface, point, quantity, t, cfg):
    w = point.w
    n = point.n
    if quantity == "A":
        return area_star(surface, point, t * w, cfg), n / 2.0
    if quantity == "V":
        return volume_star(surface, point, t * w, cfg), (n + 2) / 2.0
    if quantity == "S":
        return surface_star(surface, point, t * w, cfg), n / 2.0
    raise InvalidParameterError(f"quantity must be A, V or S, got {quantity!r}")


def lemma8_estimate(surface: ConvexSurface, point: SurfacePoint,
                    quantity: str, ladder: LadderConfig | None = None,
                    cfg: QuadratureConfig | None = None) -> LimitEstimate:
    """Extrapolate the normalized functional down a geometric offset ladder."""
    _require_positive_curvature(point)
    ladder = ladder or LadderConfig()
    t0 = ladder.t0
    rungs = None
    for _ in range(ladder.max_shrinks + 1):
        try:
            rungs = []
            for j in range(ladder.rungs):
                t = t0 * ladder.ratio ** j
                val, power = _normalized_value(surface, point, quantity, t, cfg)
                rungs.append((t, val.value / t ** power,
                              val.abs_err_est / t ** power))
            break
        except (RegionUnboundedError, DomainError):
            rungs = None
            t0 *= 0.5
    if rungs is None:
        raise RegionUnboundedError(
            f"ladder start t0 could not be shrunk into the domain after "
            f"{ladder.max_shrinks} halvings"
        )
    ts = np.array([r[0] for r in rungs])
    ys = np.array([r[1] for r in rungs])
    errs = np.array([r[2] for r in rungs])
    design = np.stack([np.ones_like(ts), np.sqrt(ts), ts], axis=1)
    coeffs, res, *_ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coeffs
    scale = math.sqrt(float(resid @ resid) / max(len(ts) - 3, 1))
    uncertainty = scale + float(np.max(errs))
    predicted = lemma8_predicted(point, quantity)
    extrapolated = float(coeffs[0])
    return LimitEstimate(
        quantity=quantity, extrapolated=extrapolated, uncertainty=uncertainty,
        ladder=[(float(t), float(y)) for t, y, _ in rungs],
        predicted=predicted,
        rel_dev=abs(extrapolated - predicted) / abs(predicted),
    )


@dataclass(frozen=True)
class HessianFactor:
    """Symmetric square-root factorization of the Taylor quadratic form."""

    a_matrix: np.ndarray  # D^2 f(x0) / 2
    b_matrix: np.ndarray  # symmetric PD with B B = A
    det_b: float

    @property
    def area_limit(self) -> float:
        """omega_n / det B in graph coordinates.

        Equals the curvature-based limit for A at points with vanishing
        gradient (where graph and tangent frames coincide); at a general
        point the two differ by the stretch factor W^((n+2)/2).
        """
        return ball_volume(self.a_matrix.shape[0]) / self.det_b


def hessian_sqrt_factor(point: SurfacePoint) -> HessianFactor:
    a = 0.5 * point.hessian
    eigvals, vecs = np.linalg.eigh(a)
    if eigvals[0] <= _K_FLOOR * max(1.0, abs(float(np.trace(a)))):
        raise DegenerateCurvatureError(
            f"Hessian not positive definite at {point.x0} "
            f"(min eigenvalue {eigvals[0]:.3g})"
        )
    b = (vecs * np.sqrt(eigvals)) @ vecs.T
    return HessianFactor(a_matrix=a, b_matrix=b,
                         det_b=float(np.prod(np.sqrt(eigvals))))


def cap_oracle_sphere(a: float, t: float, n: int, quantity: str) -> float:
    """Closed-form / high-accuracy cap functionals of a radius-a sphere.

    A = omega_n (2at - t^2)^(n/2); V and S by 1-D radial quadrature at
    1e-12 target (closed forms for n = 2), exact enough to act as oracles.
    """
    if not 0 < t < a:
        raise DomainError(f"cap depth must satisfy 0 < t < a, got t={t}, a={a}")
    wn = ball_volume(n)
    if quantity == "A":
        return wn * (2.0 * a * t - t * t) ** (n / 2.0)
    if quantity == "V":
        if n == 2:
            return math.pi * t * t * (a - t / 3.0)
        val, _ = _quad1d(lambda z: wn * (2.0 * a * z - z * z) ** (n / 2.0),
                         0.0, t, epsabs=1e-14, epsrel=1e-12)
        return val
    if quantity == "S":
        if n == 2:
            return 2.0 * math.pi * a * t
        # polar angle from the pole; cap reaches cos(theta) = (a - t)/a
        theta_t = math.acos((a - t) / a)
        val, _ = _quad1d(lambda th: math.sin(th) ** (n - 1), 0.0, theta_t,
                         epsabs=1e-14, epsrel=1e-12)
        return sphere_area(n) * a ** n * val
    raise InvalidParameterError(f"quantity must be A, V or S, got {quantity!r}")


def paraboloid_alpha(coeffs) -> float:
    """Shape constant alpha_n = 2 sigma_{n-1} / (n (n+2) a_1 ... a_n)."""
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if np.any(a <= 0):
        raise InvalidParameterError("paraboloid coefficients must be positive")
    n = a.shape[0]
    return 2.0 * sphere_area(n) / (n * (n + 2) * float(np.prod(a)))


def cap_oracle_paraboloid(coeffs, point: SurfacePoint, k: float,
                          quantity: str) -> float:
    """Closed-form starred functionals of the elliptic paraboloid.

    v* = alpha_n k^((n+2)/2) (independent of the point); a* picks up the
    single factor W(p).  Lateral area has no elementary closed form and is
    not provided here.
    """
    if k <= 0:
        raise InvalidParameterError(f"offset k must be positive, got {k}")
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    n = a.shape[0]
    alpha = paraboloid_alpha(a)
    if quantity == "V":
        return alpha * k ** ((n + 2) / 2.0)
    if quantity == "A":
        return 0.5 * (n + 2) * alpha * point.w * k ** (n / 2.0)
    raise InvalidParameterError(f"quantity must be A or V, got {quantity!r}")


def paraboloid_local_oracle(coeffs, point: SurfacePoint, t: float,
                            quantity: str) -> float:
    """Tangent-frame closed forms V(t) and A(t) of the elliptic paraboloid."""
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    n = a.shape[0]
    alpha = paraboloid_alpha(a)
    w = point.w
    if quantity == "V":
        return alpha * w ** ((n + 2) / 2.0) * t ** ((n + 2) / 2.0)
    if quantity == "A":
        return 0.5 * (n + 2) * alpha * w ** ((n + 2) / 2.0) * t ** (n / 2.0)
    raise InvalidParameterError(f"quantity must be A or V, got {quantity!r}")
