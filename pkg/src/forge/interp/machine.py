"""Big-step interpreter with probes at the four loop locations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from ..lang.ast import (
    Assign,
    If,
    Program,
    Seq,
    Skip,
    Stmt,
    Store,
    Type,
    While,
)
from .evaluator import DefinednessError, compile_formula

DEFAULT_STEP_LIMIT = 10**6


class Probe(enum.Enum):
    BEFORE_ENTRY = "BeforeEntry"
    AT_ENTRY = "AtEntry"
    AT_EXIT = "AtExit"
    AFTER_EXIT = "AfterExit"


class OutcomeKind(enum.Enum):
    NORMAL = "normal"
    PRE_VIOLATED = "precondition-violated"
    RUNTIME_ERROR = "runtime-error"
    STEP_LIMIT = "step-limit-exceeded"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    result: Any = None
    detail: str = ""

    @property
    def normal(self) -> bool:
        return self.kind is OutcomeKind.NORMAL


@dataclass(frozen=True)
class Env:
    """Variable bindings plus the entry snapshot and the result value.

    Arrays are stored as tuples, so an Env never changes after creation.
    """

    vars: Mapping[str, Any]
    old: Mapping[str, Any] = field(default_factory=dict)
    result: Any = None


@dataclass(frozen=True)
class ProbeEvent:
    loop_id: int
    kind: Probe
    vars: Mapping[str, Any]


@dataclass(frozen=True)
class Trace:
    input: Env
    events: tuple[ProbeEvent, ...]
    outcome: Outcome
    branches: frozenset[str] = frozenset()
    final: Optional[Env] = None
    post_failures: tuple[int, ...] = ()

    def states(self, loop_id: int) -> list[Mapping[str, Any]]:
        """Snapshots at which an invariant of `loop_id` must hold."""
        return [
            ev.vars
            for ev in self.events
            if ev.loop_id == loop_id and ev.kind in (Probe.AT_ENTRY, Probe.AT_EXIT)
        ]


class _StepLimit(Exception):
    pass


def freeze(value: Any) -> Any:
    return tuple(value) if isinstance(value, list) else value


def snapshot(vars_: Mapping[str, Any]) -> dict[str, Any]:
    return {k: freeze(v) for k, v in vars_.items()}


def default_value(t: Type) -> Any:
    return False if t == Type.BOOL else (None if t == Type.ARRAY else 0)


class _Machine:
    def __init__(self, program: Program, step_limit: int):
        self.program = program
        self.step_limit = step_limit
        self.steps = 0
        self.events: list[ProbeEvent] = []
        self.branches: set[str] = set()
        self.vars: dict[str, Any] = {}
        self.old: dict[str, Any] = {}

    def ev(self, expr):
        return compile_formula(expr)(self.vars, self.old, None)

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise _StepLimit()

    def probe(self, site: int, kind: Probe) -> None:
        self.events.append(ProbeEvent(site, kind, snapshot(self.vars)))

    def exec(self, s: Stmt) -> None:
        if isinstance(s, Seq):
            for c in s.stmts:
                self.exec(c)
        elif isinstance(s, Assign):
            self.tick()
            self.vars[s.target] = self.ev(s.rhs)
        elif isinstance(s, Store):
            self.tick()
            arr = self.vars[s.array]
            idx = self.ev(s.index)
            value = self.ev(s.rhs)
            if arr is None:
                raise DefinednessError("null")
            if idx < 0 or idx >= len(arr):
                raise DefinednessError("bounds")
            arr[idx] = value
        elif isinstance(s, If):
            self.tick()
            taken = bool(self.ev(s.cond))
            self.branches.add(f"if{s.branch_id}:{'T' if taken else 'F'}")
            self.exec(s.then if taken else s.orelse)
        elif isinstance(s, While):
            self.run_loop(s)
        elif isinstance(s, Skip):
            pass
        else:
            raise TypeError(f"not a statement: {s!r}")

    def run_loop(self, s: While) -> None:
        self.probe(s.site, Probe.BEFORE_ENTRY)
        iterations = 0
        while True:
            self.tick()
            if not self.ev(s.cond):
                break
            iterations += 1
            self.probe(s.site, Probe.AT_ENTRY)
            self.exec(s.body)
        self.probe(s.site, Probe.AT_EXIT)
        self.probe(s.site, Probe.AFTER_EXIT)
        self.branches.add(f"loop{s.site}:{'enter' if iterations else 'skip'}")
        if iterations > 1:
            self.branches.add(f"loop{s.site}:repeat")


def initial_vars(program: Program, inputs: Mapping[str, Any]) -> dict[str, Any]:
    vars_: dict[str, Any] = {}
    for name, t in program.params:
        value = inputs[name]
        vars_[name] = list(value) if isinstance(value, (list, tuple)) else value
    if program.result is not None:
        vars_[program.result[0]] = default_value(program.result[1])
    for name, t in program.locals:
        vars_[name] = default_value(t)
    return vars_


def run(program: Program, inputs: Mapping[str, Any], step_limit: int = DEFAULT_STEP_LIMIT) -> Trace:
    """Execute `program` on parameter values `inputs` and record a Trace."""
    m = _Machine(program, step_limit)
    m.vars = initial_vars(program, inputs)
    m.old = snapshot(m.vars)
    entry = Env(dict(m.old), dict(m.old))

    pre_ok = True
    for i, clause in enumerate(program.pre):
        try:
            passed = bool(m.ev(clause))
        except DefinednessError:
            passed = False
        m.branches.add(f"pre{i}:{'T' if passed else 'F'}")
        if not passed:
            pre_ok = False
            break
    if not pre_ok:
        return Trace(entry, (), Outcome(OutcomeKind.PRE_VIOLATED), frozenset(m.branches))

    try:
        m.exec(program.body)
    except DefinednessError as exc:
        return Trace(entry, tuple(m.events), Outcome(OutcomeKind.RUNTIME_ERROR, detail=exc.kind),
                     frozenset(m.branches))
    except _StepLimit:
        return Trace(entry, tuple(m.events), Outcome(OutcomeKind.STEP_LIMIT), frozenset(m.branches))

    result = m.vars[program.result[0]] if program.result is not None else None
    final = Env(snapshot(m.vars), m.old, freeze(result))
    failures = []
    for i, clause in enumerate(program.post):
        try:
            ok = bool(compile_formula(clause)(final.vars, m.old, final.result))
        except DefinednessError:
            ok = False
        if not ok:
            failures.append(i)
    return Trace(entry, tuple(m.events), Outcome(OutcomeKind.NORMAL, freeze(result)),
                 frozenset(m.branches), final, tuple(failures))
