"""Deterministic interpreter, runtime formula evaluation and trace checks."""

from .checks import (
    SURVIVES,
    Verdict,
    check_candidates_on_trace,
    holds_on_states,
    site_states,
    survives_all,
    violation,
)
from .evaluator import DefinednessError, compile_formula, eval_expr, holds, tdiv, tmod
from .machine import (
    DEFAULT_STEP_LIMIT,
    Env,
    Outcome,
    OutcomeKind,
    Probe,
    ProbeEvent,
    Trace,
    run,
)


def eval_formula(f, env: Env) -> bool:
    """Truth value of `f` in `env`; raises DefinednessError when undefined."""
    return bool(compile_formula(f)(env.vars, env.old or env.vars, env.result))


__all__ = [
    "DEFAULT_STEP_LIMIT",
    "DefinednessError",
    "Env",
    "Outcome",
    "OutcomeKind",
    "Probe",
    "ProbeEvent",
    "SURVIVES",
    "Trace",
    "Verdict",
    "check_candidates_on_trace",
    "compile_formula",
    "eval_expr",
    "eval_formula",
    "holds",
    "holds_on_states",
    "run",
    "site_states",
    "survives_all",
    "tdiv",
    "tmod",
    "violation",
]
