"""Postcondition mutation: pools, operators, waves and validation."""

from .operators import (
    Mutant,
    MutantSet,
    aging_raw,
    apply_aging,
    apply_substitution,
    apply_weakening,
    int_paths,
    substitution_raw,
    weakening_raw,
)
from .pools import ExpressionPool, build_pools, extract_predicates, predicate_seeds, top_level_atoms
from .validate import dynamic_validate, eliminate_tautologies
from .waves import (
    KIND_NAMES,
    ConfigError,
    Schedule,
    Wave,
    WaveResult,
    load_schedule,
    parse_schedule,
    run_wave,
    wave_seeds,
)

__all__ = [
    "ConfigError",
    "ExpressionPool",
    "KIND_NAMES",
    "Mutant",
    "MutantSet",
    "Schedule",
    "Wave",
    "WaveResult",
    "aging_raw",
    "apply_aging",
    "apply_substitution",
    "apply_weakening",
    "build_pools",
    "dynamic_validate",
    "eliminate_tautologies",
    "extract_predicates",
    "int_paths",
    "load_schedule",
    "parse_schedule",
    "predicate_seeds",
    "run_wave",
    "substitution_raw",
    "top_level_atoms",
    "wave_seeds",
    "weakening_raw",
]
