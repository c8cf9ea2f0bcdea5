"""Dyadic-precision toolkit for pinned distance and projection experiments on fractal sets."""

__version__ = "0.1.0"

from .errors import (
    DegenerateDirectionError,
    DomainError,
    MembershipError,
    PrecisionError,
    PrecisionOverflowError,
    PreconditionError,
    RegressionError,
)
from .dyadic import (
    MAX_PRECISION,
    Direction,
    DyadicPoint,
    DyadicScalar,
    direction_between,
    floor_r,
    project,
    refine_floor,
)
from .fractals import (
    CellSet,
    FractalSpec,
    generate,
    level_counts,
    product,
    read_cellset,
    sample_points,
    write_cellset,
)
from .complexity import (
    ComplexityProfile,
    DimensionEstimate,
    conditional_counts,
    dimension_estimate,
    profile,
    surrogate_K,
    surrogate_K_cond,
)
from .geometry import (
    Annulus,
    ArcSector,
    ReconstructionRegion,
    annulus_intersection_cover,
    pinned_distance_cells,
    projection_cells,
    reconstruct_from_distances,
    reconstruct_from_projections,
    annulus_arc_bound,
)
from .selection import (
    PairCertificate,
    SelectionInstance,
    find_pair,
    verify_hypotheses,
)
from .experiments import (
    BoundCurvePoint,
    bound_curves,
    half_information_check,
    lemma_stress,
    pinned_distance_study,
    projection_sweep,
)

__all__ = [
    "__version__",
    "DegenerateDirectionError",
    "DomainError",
    "MembershipError",
    "PrecisionError",
    "PrecisionOverflowError",
    "PreconditionError",
    "RegressionError",
    "MAX_PRECISION",
    "Direction",
    "DyadicPoint",
    "DyadicScalar",
    "direction_between",
    "floor_r",
    "project",
    "refine_floor",
    "CellSet",
    "FractalSpec",
    "generate",
    "level_counts",
    "product",
    "read_cellset",
    "sample_points",
    "write_cellset",
    "ComplexityProfile",
    "DimensionEstimate",
    "conditional_counts",
    "dimension_estimate",
    "profile",
    "surrogate_K",
    "surrogate_K_cond",
    "Annulus",
    "ArcSector",
    "ReconstructionRegion",
    "annulus_intersection_cover",
    "pinned_distance_cells",
    "projection_cells",
    "reconstruct_from_distances",
    "reconstruct_from_projections",
    "annulus_arc_bound",
    "PairCertificate",
    "SelectionInstance",
    "find_pair",
    "verify_hypotheses",
    "BoundCurvePoint",
    "bound_curves",
    "half_information_check",
    "lemma_stress",
    "pinned_distance_study",
    "projection_sweep",
]
