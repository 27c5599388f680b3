"""Exception hierarchy for the hypersect library."""


class HypersectError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(HypersectError):
    """A constructor or operation received an out-of-range parameter."""


class DomainError(HypersectError):
    """Evaluation requested outside the surface's domain of definition."""


class RegionUnboundedError(HypersectError):
    """A section region escapes the surface domain along some direction."""


class ConvexityViolationError(HypersectError):
    """The gauge function was found negative: the surface is not convex."""


class DegenerateCurvatureError(HypersectError):
    """Gauss-Kronecker curvature vanishes where a positive value is required."""


class EvaluationError(HypersectError):
    """An integrand returned a non-finite value."""


class IllConditionedRegionError(HypersectError):
    """Monte Carlo acceptance rate too low for a trustworthy estimate."""


class PreconditionError(HypersectError):
    """An operation was called on inputs violating its stated precondition."""
