"""
Analysis services: conservation laws, elimination, point solving, regions, stability.
"""
from .cache_service import ResultCache
from .conservation_service import linear_first_integrals, nonnegative_basis, resolve_laws, verify_laws
from .elimination_service import (
    ReducedSystem,
    ReductionService,
    back_substitute,
    build_graph,
    gauss_eliminate,
    min_vertex_cover,
    reduce_model,
)
from .pointsolve_service import (
    FixedPointRecord,
    GridResult,
    SampleRange,
    SamplingService,
    grid_sample,
    solve_at_point,
)
from .region_service import (
    RegionReport,
    RegionService,
    boundary_conjecture_check,
    build_open_cad,
    classify_region,
    eliminate_linear,
    project,
)
from .stability_service import (
    StabilityService,
    StabilityVerdict,
    char_poly,
    classify_fixed_points,
    reduced_jacobian,
    rhp_count,
)

__all__ = [
    "FixedPointRecord",
    "GridResult",
    "ReducedSystem",
    "ReductionService",
    "RegionReport",
    "RegionService",
    "ResultCache",
    "SampleRange",
    "SamplingService",
    "StabilityService",
    "StabilityVerdict",
    "back_substitute",
    "boundary_conjecture_check",
    "build_graph",
    "build_open_cad",
    "char_poly",
    "classify_fixed_points",
    "classify_region",
    "eliminate_linear",
    "gauss_eliminate",
    "grid_sample",
    "linear_first_integrals",
    "min_vertex_cover",
    "nonnegative_basis",
    "project",
    "reduce_model",
    "reduced_jacobian",
    "resolve_laws",
    "rhp_count",
    "solve_at_point",
    "verify_laws",
]
