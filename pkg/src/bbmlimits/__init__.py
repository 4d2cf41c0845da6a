"""Nonlocal energy functionals on metric measure spaces and their small-scale limits."""

__version__ = "0.1.0"

from .energy import (
    DensityProfile,
    EnergyEstimate,
    MeasureWithDensity,
    QuadratureConfig,
    Sandwich,
    density_estimate,
    inner_integral,
    ks,
    nonlocal_energy,
    pou_smooth,
    regularize,
    sandwich,
    tail_energy,
)
from .maps import (
    MapSpec,
    Seminorm,
    TargetSpace,
    UnsupportedTargetError,
    cheeger_energy_smooth,
    metric_differential,
    pair_distance,
    predicted_limit,
    unit_ball_moment,
)
from .mollifiers import (
    AdmissibilityReport,
    MollifierFamily,
    PiTerms,
    check_admissibility,
    kernel,
    pi_terms,
    sigma,
    theta_formula,
)
from .space import (
    DegenerateSpaceError,
    DomainError,
    Space,
    Weight,
    ball_measure,
    dimension_at,
    estimate_doubling,
    sample_points,
)

__all__ = [
    "__version__",
    "DensityProfile",
    "EnergyEstimate",
    "MeasureWithDensity",
    "QuadratureConfig",
    "Sandwich",
    "density_estimate",
    "inner_integral",
    "ks",
    "nonlocal_energy",
    "pou_smooth",
    "regularize",
    "sandwich",
    "tail_energy",
    "MapSpec",
    "Seminorm",
    "TargetSpace",
    "UnsupportedTargetError",
    "cheeger_energy_smooth",
    "metric_differential",
    "pair_distance",
    "predicted_limit",
    "unit_ball_moment",
    "AdmissibilityReport",
    "MollifierFamily",
    "PiTerms",
    "check_admissibility",
    "kernel",
    "pi_terms",
    "sigma",
    "theta_formula",
    "DegenerateSpaceError",
    "DomainError",
    "Space",
    "Weight",
    "ball_measure",
    "dimension_at",
    "estimate_doubling",
    "sample_points",
]
