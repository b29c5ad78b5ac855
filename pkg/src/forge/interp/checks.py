"""Checking candidate invariants against recorded traces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..candidates import Candidate
from ..lang.ast import Expr
from .evaluator import DefinednessError, compile_formula
from .machine import Probe, ProbeEvent, Trace


@dataclass(frozen=True)
class Verdict:
    survives: bool
    event: Optional[ProbeEvent] = None
    reason: str = ""


SURVIVES = Verdict(True)


def violation(formula: Expr, loop_id: int, trace: Trace) -> Optional[Verdict]:
    """First AtEntry/AtExit event of `loop_id` where `formula` is false or undefined."""
    fn = compile_formula(formula)
    old = trace.input.old
    for ev in trace.events:
        if ev.loop_id != loop_id or ev.kind not in (Probe.AT_ENTRY, Probe.AT_EXIT):
            continue
        try:
            if not fn(ev.vars, old, None):
                return Verdict(False, ev, "false")
        except DefinednessError as exc:
            return Verdict(False, ev, exc.kind)
    return None


def check_candidates_on_trace(candidates: Sequence[Candidate], trace: Trace) -> list[Verdict]:
    return [violation(c.formula, c.loop_id, trace) or SURVIVES for c in candidates]


def survives_all(formula: Expr, loop_id: int, traces: Iterable[Trace]) -> bool:
    """True iff `formula` holds at every probe state of `loop_id` in `traces`."""
    fn = compile_formula(formula)
    for trace in traces:
        old = trace.input.old
        for ev in trace.events:
            if ev.loop_id != loop_id or ev.kind not in (Probe.AT_ENTRY, Probe.AT_EXIT):
                continue
            try:
                if not fn(ev.vars, old, None):
                    return False
            except DefinednessError:
                return False
    return True


def site_states(traces: Iterable[Trace], loop_id: int) -> list[tuple[dict, dict]]:
    """Distinct (vars, old) pairs at the AtEntry/AtExit events of `loop_id`."""
    seen: set = set()
    out: list[tuple[dict, dict]] = []
    for trace in traces:
        old = trace.input.old
        old_key = tuple(sorted(old.items()))
        for ev in trace.events:
            if ev.loop_id != loop_id or ev.kind not in (Probe.AT_ENTRY, Probe.AT_EXIT):
                continue
            key = (tuple(sorted(ev.vars.items())), old_key)
            if key not in seen:
                seen.add(key)
                out.append((ev.vars, old))
    return out


def holds_on_states(formula: Expr, states: Sequence[tuple[dict, dict]], cache: bool = True) -> bool:
    fn = compile_formula(formula, cache)
    try:
        for v, o in states:
            if not fn(v, o, None):
                return False
    except DefinednessError:
        return False
    return True
