"""Verification-condition generation, SMT dispatch and Houdini."""

from .encode import EncodingError
from .houdini import ProofResult, houdini, inductive, prove_program, tautologies
from .solver import INVALID, UNKNOWN, VALID, Solver, SolverConfig, Verdict
from .vcgen import (
    INITIATION,
    POST,
    PRESERVATION,
    SAFETY,
    TAUTOLOGY,
    VC,
    generate_vcs,
    tautology_vcs,
)

__all__ = [
    "EncodingError",
    "INITIATION",
    "INVALID",
    "POST",
    "PRESERVATION",
    "ProofResult",
    "SAFETY",
    "Solver",
    "SolverConfig",
    "TAUTOLOGY",
    "UNKNOWN",
    "VALID",
    "VC",
    "Verdict",
    "generate_vcs",
    "houdini",
    "inductive",
    "prove_program",
    "tautologies",
    "tautology_vcs",
]
