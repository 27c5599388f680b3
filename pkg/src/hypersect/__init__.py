"""Hyperplane-section functionals of smooth convex graph hypersurfaces.

Computes section area, cap volume and lateral surface area for convex
graphs, estimates their small-offset curvature limits, and runs the
constancy scans that single out hyperspheres and elliptic paraboloids.
"""

from .asymptotics import (
    HessianFactor,
    LadderConfig,
    LimitEstimate,
    cap_oracle_paraboloid,
    cap_oracle_sphere,
    hessian_sqrt_factor,
    lemma8_estimate,
    lemma8_predicted,
    paraboloid_alpha,
)
from .characterize import (
    CONDITIONS,
    MeanValueReport,
    ScanReport,
    classify,
    infer_curvature,
    mean_value_scan,
    scan_condition,
    u_transform_check,
)
from .errors import (
    ConvexityViolationError,
    DegenerateCurvatureError,
    DomainError,
    EvaluationError,
    HypersectError,
    IllConditionedRegionError,
    InvalidParameterError,
    PreconditionError,
    RegionUnboundedError,
)
from .quad import (
    IntegralValue,
    QuadratureConfig,
    ball_volume,
    integrate_ball,
    integrate_region,
    mc_integrate_region,
    sphere_area,
)
from .region import (
    OffsetMode,
    SectionRegion,
    SectionSpec,
    build_region,
    normal_offset,
    spec_convert,
    vertical_offset,
)
from .sections import (
    SectionMeasure,
    area_star,
    dV_dt_check,
    excess_term,
    local_frame_measures,
    section_measures,
    surface_star,
    volume_star,
)
from .surface import (
    ConvexSurface,
    SurfacePoint,
    make_custom,
    make_named,
    make_paraboloid,
    make_sphere_graph,
    point_at,
    surface_from_config,
    surface_from_string,
    validate_convexity,
)

__version__ = "0.1.0"
