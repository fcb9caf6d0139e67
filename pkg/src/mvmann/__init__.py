"""Mean-value--Mann iteration for mean nonexpansive maps on hyperbolic spaces."""
from .spaces import (Euclidean, Point, PoincareDisk, SpaceModel, TripodTree, estimate_modulus,
                     make_space, verify_axioms)
from .mappings import (MeanNonexpConstants, MappingSpec, apply, estimate_min_constants,
                       make_mapping, verify_mean_nonexpansive, verify_strictly_pseudocontractive)
from .schedules import Schedule
from .iteration import (gordon_step, ishikawa_step, mann_step, mvm_step, picard_step, run)
from .diagnostics import (asymptotic_center, fejer_check, bounded_limits_check, residual_profile,
                          strong_convergence_check)
from .harness import parse_config, run_experiment, verify_suite

__version__ = "0.1.0"

__all__ = [
    "Euclidean", "Point", "PoincareDisk", "SpaceModel", "TripodTree", "estimate_modulus",
    "make_space", "verify_axioms", "MeanNonexpConstants", "MappingSpec", "apply",
    "estimate_min_constants", "make_mapping", "verify_mean_nonexpansive",
    "verify_strictly_pseudocontractive", "Schedule", "gordon_step", "ishikawa_step",
    "mann_step", "mvm_step", "picard_step", "run", "asymptotic_center", "fejer_check",
    "bounded_limits_check", "residual_profile", "strong_convergence_check", "parse_config",
    "run_experiment", "verify_suite",
]
