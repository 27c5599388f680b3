"""Convex graph hypersurfaces with exact first and second derivatives.

A surface is the graph z = f(x) over an open ball in R^n, using the upward
normal convention.  Built-in model families (elliptic paraboloids, sphere
caps as graphs, and a small registry of named convex bowls) carry analytic
gradients and Hessians; arbitrary user callables can be wrapped with
``make_custom``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ConvexityViolationError,
    DomainError,
    InvalidParameterError,
)

MAX_DIMENSION = 6

# Eigenvalues above -PSD_TOL * trace count as nonnegative in convexity checks.
PSD_TOL = 1e-10


@dataclass(frozen=True)
class ConvexSurface:
    """Graph hypersurface z = f(x) on the ball |x| < domain_radius.

    The evaluators are vectorized over leading axes: ``f`` maps (..., n) to
    (...), ``grad`` to (..., n) and ``hess`` to (..., n, n).  They must be
    pure; instances are immutable and safe to share across threads.
    """

    n: int
    f: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    domain_radius: float = math.inf
    label: str = "custom"

    def __post_init__(self):
        if not (1 <= self.n <= MAX_DIMENSION):
            raise InvalidParameterError(
                f"dimension must be in [1, {MAX_DIMENSION}], got {self.n}"
            )
        if not self.domain_radius > 0:
            raise InvalidParameterError("domain_radius must be positive")

    def check_domain(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise InvalidParameterError(
                f"point has dimension {x.shape[-1]}, surface has {self.n}"
            )
        if np.isfinite(self.domain_radius):
            r = np.linalg.norm(x, axis=-1)
            if np.any(r >= self.domain_radius):
                raise DomainError(
                    f"point with |x| = {float(np.max(r)):.6g} outside domain "
                    f"radius {self.domain_radius:.6g}"
                )

    def f_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        return np.asarray(self.f(x), dtype=float)

    def grad_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        return np.asarray(self.grad(x), dtype=float)

    def hess_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        return np.asarray(self.hess(x), dtype=float)

    def w_at(self, x) -> np.ndarray:
        """Area-stretch factor W(x) = sqrt(1 + |grad f|^2)."""
        g = self.grad_at(x)
        return np.sqrt(1.0 + np.sum(g * g, axis=-1))


@dataclass(frozen=True)
class SurfacePoint:
    """A base point with cached derivatives and Gauss-Kronecker curvature."""

    x0: np.ndarray
    height: float
    gradient: np.ndarray
    w: float
    hessian: np.ndarray
    k_curv: float

    @property
    def n(self) -> int:
        return self.x0.shape[0]


def point_at(surface: ConvexSurface, x0) -> SurfacePoint:
    """Evaluate and cache f, grad f, W and K at a base point.

    K = det D^2 f / W^(n+2) with the upward normal.  The determinant comes
    from a symmetric eigendecomposition so the convexity check and the
    determinant share one factorization.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    surface.check_domain(x0)
    h = float(surface.f_at(x0))
    g = surface.grad_at(x0)
    w = math.sqrt(1.0 + float(g @ g))
    hess = surface.hess_at(x0)
    eigvals = _check_convex_hessian(hess, x0)
    det = float(np.prod(eigvals))
    k_curv = det / w ** (surface.n + 2)
    return SurfacePoint(
        x0=x0, height=h, gradient=g, w=w, hessian=hess, k_curv=k_curv
    )


def _check_convex_hessian(hess: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Symmetry + PSD spot check; returns the eigenvalues."""
    asym = np.max(np.abs(hess - hess.T))
    if asym > 1e-12 * max(1.0, np.max(np.abs(hess))):
        raise ConvexityViolationError(
            f"Hessian not symmetric at x = {x} (asymmetry {asym:.3g})"
        )
    eigvals = np.linalg.eigvalsh(hess)
    floor = -PSD_TOL * max(1.0, abs(float(np.trace(hess))))
    if eigvals[0] < floor:
        raise ConvexityViolationError(
            f"Hessian indefinite at x = {x} (min eigenvalue {eigvals[0]:.3g})"
        )
    return np.clip(eigvals, 0.0, None)


def make_paraboloid(coeffs) -> ConvexSurface:
    """Elliptic paraboloid f(x) = sum_i a_i^2 x_i^2 with all a_i > 0."""
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if np.any(a <= 0):
        raise InvalidParameterError(f"paraboloid coefficients must be positive, got {a}")
    n = a.shape[0]
    a2 = a * a
    hess_const = np.diag(2.0 * a2)

    def f(x):
        return np.sum(a2 * x * x, axis=-1)

    def grad(x):
        return 2.0 * a2 * x

    def hess(x):
        shape = np.asarray(x).shape[:-1] + (n, n)
        return np.broadcast_to(hess_const, shape).copy()

    label = "paraboloid:" + ",".join(f"{c:g}" for c in a)
    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         domain_radius=math.inf, label=label)


def make_sphere_graph(radius: float, n: int = 2) -> ConvexSurface:
    """Lower hemisphere of a radius-a sphere as the graph f(x) = a - sqrt(a^2 - |x|^2).

    The graph touches the origin (the pole); the domain is |x| < a.
    """
    a = float(radius)
    if a <= 0:
        raise InvalidParameterError(f"sphere radius must be positive, got {a}")

    def _s(x):
        # sqrt(a^2 - |x|^2); domain enforcement happens in check_domain
        return np.sqrt(a * a - np.sum(x * x, axis=-1))

    def f(x):
        return a - _s(x)

    def grad(x):
        return x / _s(x)[..., None]

    def hess(x):
        s = _s(x)
        eye = np.eye(n)
        outer = x[..., :, None] * x[..., None, :]
        return eye / s[..., None, None] + outer / (s ** 3)[..., None, None]

    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         domain_radius=a, label=f"sphere:{a:g}(n={n})")


def make_custom(n, f, grad, hess, domain_radius=math.inf,
                label="custom", vectorized=True) -> ConvexSurface:
    """Wrap user callables as a surface.

    Convexity is checked lazily at evaluated points, never proven.  With
    ``vectorized=False`` the callables take a single point of shape (n,)
    and are looped over batches.
    """
    if not vectorized:
        f, grad, hess = (_batchify(f, ()), _batchify(grad, (n,)),
                         _batchify(hess, (n, n)))
    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         domain_radius=domain_radius, label=label)


def _batchify(fn, out_shape):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, x.shape[-1])
        out = np.stack([np.asarray(fn(row), dtype=float) for row in flat])
        return out.reshape(x.shape[:-1] + out_shape)
    return wrapped


def _make_cosh_bowl(n: int) -> ConvexSurface:
    def f(x):
        return np.sum(np.cosh(x) - 1.0, axis=-1)

    def grad(x):
        return np.sinh(x)

    def hess(x):
        return _diag_batch(np.cosh(x))

    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         label=f"cosh-bowl(n={n})")


def _make_quartic_bowl(n: int) -> ConvexSurface:
    def f(x):
        return np.sum(x ** 4, axis=-1)

    def grad(x):
        return 4.0 * x ** 3

    def hess(x):
        return _diag_batch(12.0 * x ** 2)

    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         label=f"quartic-bowl(n={n})")


def _make_exp_bowl(n: int) -> ConvexSurface:
    def f(x):
        return np.sum(np.exp(x) - x - 1.0, axis=-1)

    def grad(x):
        return np.exp(x) - 1.0

    def hess(x):
        return _diag_batch(np.exp(x))

    return ConvexSurface(n=n, f=f, grad=grad, hess=hess,
                         label=f"exp-bowl(n={n})")


def _diag_batch(d: np.ndarray) -> np.ndarray:
    n = d.shape[-1]
    out = np.zeros(d.shape + (n,))
    idx = np.arange(n)
    out[..., idx, idx] = d
    return out


NAMED_SURFACES = {
    "cosh-bowl": _make_cosh_bowl,
    "quartic-bowl": _make_quartic_bowl,
    "exp-bowl": _make_exp_bowl,
}


def make_named(name: str, n: int = 2) -> ConvexSurface:
    try:
        factory = NAMED_SURFACES[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown named surface {name!r}; choices: {sorted(NAMED_SURFACES)}"
        ) from None
    return factory(n)


def surface_from_string(text: str) -> ConvexSurface:
    """Parse 'kind:params' surface descriptors.

    paraboloid:1,2   sphere:1  sphere:1,n=3   cosh-bowl  cosh-bowl:n=2
    """
    kind, _, params = text.partition(":")
    kind = kind.strip()
    items = [p.strip() for p in params.split(",") if p.strip()] if params else []
    kw = {}
    plain = []
    for item in items:
        if "=" in item:
            key, _, val = item.partition("=")
            kw[key.strip()] = val.strip()
        else:
            plain.append(item)
    if kind == "paraboloid":
        if not plain:
            raise InvalidParameterError("paraboloid needs coefficients, e.g. paraboloid:1,1")
        return make_paraboloid([float(p) for p in plain])
    if kind == "sphere":
        if not plain:
            raise InvalidParameterError("sphere needs a radius, e.g. sphere:1")
        return make_sphere_graph(float(plain[0]), n=int(kw.get("n", 2)))
    if kind in NAMED_SURFACES:
        return make_named(kind, n=int(kw.get("n", 2)))
    raise InvalidParameterError(f"unknown surface kind {kind!r}")


def parse_kv_file(path) -> dict:
    """Parse a simple 'key = value' config file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def surface_from_config(cfg: dict) -> ConvexSurface:
    """Build a surface from parsed config keys (kind, coefficients, radius, name, dim)."""
    kind = cfg.get("kind")
    if kind == "paraboloid":
        coeffs = [float(c) for c in cfg["coefficients"].split(",")]
        return make_paraboloid(coeffs)
    if kind == "sphere":
        return make_sphere_graph(float(cfg["radius"]), n=int(cfg.get("dim", 2)))
    if kind == "named-custom":
        return make_named(cfg["name"], n=int(cfg.get("dim", 2)))
    raise InvalidParameterError(f"config kind must be paraboloid|sphere|named-custom, got {kind!r}")


def validate_convexity(surface: ConvexSurface, samples: int = 100,
                       seed: int = 0, box: float | None = None) -> None:
    """Spot-check convexity by sampling PSD Hessians inside the domain.

    Raises ConvexityViolationError on the first indefinite Hessian found.
    """
    rng = np.random.default_rng(seed)
    if box is None:
        box = 1.0 if not np.isfinite(surface.domain_radius) else 0.7 * surface.domain_radius
    for _ in range(samples):
        x = rng.uniform(-box, box, size=surface.n)
        if np.linalg.norm(x) >= surface.domain_radius:
            continue
        _check_convex_hessian(surface.hess_at(x), x)
