"""Inter-plane inter-satellite link establishment for dense polar
constellations: geometry, link budgets, greedy matching, interference-aware
resource allocation, and the Monte Carlo experiment harness."""

__version__ = "0.1.0"

from .geometry import (
    Constellation,
    ConstellationConfig,
    Direction,
    Satellite,
    build_constellation,
    distance,
    has_los,
    max_doppler,
    max_slant_range,
    propagate,
    relative_direction,
)
from .linkbudget import (
    AccessScheme,
    Antenna,
    RadioConfig,
    ResourceSet,
    effective_rate,
    fspl,
    min_eirpg,
    rate_sinr,
    rate_snr,
    snr,
    worst_case_interference,
)
from .graph import (
    Allocation,
    Edge,
    FeasibilityGraph,
    Matching,
    build_feasibility_graph,
    degree_check,
)
from .matching import MatchingResult, geo, giem, gmm
from .allocation import allocation_value, gra, random_alloc, round_robin
from .design import grid_adjacent_range, max_adjacent_range, required_eirpg
from .simharness import (
    ExperimentSpec,
    KSweepRow,
    MetricsReport,
    allocation_sweep,
    run_experiment,
    sweep,
)

__all__ = [
    "AccessScheme",
    "Allocation",
    "Antenna",
    "Constellation",
    "ConstellationConfig",
    "Direction",
    "Edge",
    "ExperimentSpec",
    "FeasibilityGraph",
    "KSweepRow",
    "Matching",
    "MatchingResult",
    "MetricsReport",
    "RadioConfig",
    "ResourceSet",
    "Satellite",
    "allocation_sweep",
    "allocation_value",
    "build_constellation",
    "build_feasibility_graph",
    "degree_check",
    "distance",
    "effective_rate",
    "fspl",
    "geo",
    "giem",
    "gmm",
    "gra",
    "grid_adjacent_range",
    "has_los",
    "max_adjacent_range",
    "max_doppler",
    "max_slant_range",
    "min_eirpg",
    "propagate",
    "random_alloc",
    "rate_sinr",
    "rate_snr",
    "relative_direction",
    "required_eirpg",
    "round_robin",
    "run_experiment",
    "snr",
    "sweep",
    "worst_case_interference",
]
