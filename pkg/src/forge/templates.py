"""Fixed-template candidate invariants instantiated from observed loop states."""

from __future__ import annotations

from typing import Iterable, Sequence

from .candidates import TEMPLATE, Candidate, Status
from .interp import holds_on_states, site_states
from .lang.ast import Binary, Expr, IntLit, Length, LoopSite, NullLit, Program, Type, Unary, Var
from .lang.normalize import formula_key
from .testgen import TestSuite

LITERALS = (0, 1, -1)
MAX_SET = 3
MAX_VARS = 2


def _lit(v: int) -> Expr:
    return IntLit(v)


def _b(op: str, left: Expr, right: Expr) -> Expr:
    return Binary(op, left, right)


def unary_int_templates(x: Var, constants: Sequence[int]) -> list[Expr]:
    out: list[Expr] = []
    for c in constants:
        out += [_b(">=", x, _lit(c)), _b("<=", x, _lit(c)), _b("==", x, _lit(c)), _b("!=", x, _lit(c))]
    return out


def set_template(x: Var, values: Sequence[int]) -> list[Expr]:
    """`x == v1 || ... || x == vk` for an observed value set with 2..3 members."""
    if not 2 <= len(values) <= MAX_SET:
        return []
    disj: Expr = _b("==", x, _lit(values[0]))
    for v in values[1:]:
        disj = _b("||", disj, _b("==", x, _lit(v)))
    return [disj]


def pair_templates(x: Var, y: Var) -> list[Expr]:
    return [
        _b(">=", x, y), _b("<=", x, y), _b("==", x, y), _b("!=", x, y), _b("<", x, y), _b(">", x, y),
        _b("<=", x, _b("+", y, _lit(1))), _b("<=", y, _b("+", x, _lit(1))),
    ]


def array_templates(a: Var) -> list[Expr]:
    return [_b("!=", a, NullLit()), _b("==", a, NullLit())]


def mixed_templates(x: Var, a: Var) -> list[Expr]:
    n = Length(a)
    return [_b("<=", x, _b("-", n, _lit(1))), _b(">=", x, n), _b("==", x, n), _b("<=", x, n)]


def bool_templates(b: Var) -> list[Expr]:
    return [b, Unary("!", b)]


def _observed(states, name: str) -> list[int]:
    return sorted({v[name] for v, _ in states})


def instantiate_templates(site: LoopSite, suite: TestSuite, program: Program) -> list[Candidate]:
    """Every catalog schema over the variables in scope at `site`.

    Constants come from the values observed at the loop head plus a few
    small literals and the literals of the program text.
    """
    types = program.var_types
    scope = list(site.in_scope)
    ints = [Var(n) for n in scope if types[n] == Type.INT]
    arrays = [Var(n) for n in scope if types[n] == Type.ARRAY]
    bools = [Var(n) for n in scope if types[n] == Type.BOOL]
    states = site_states(suite.traces(), site.id)
    literals = list(LITERALS) + sorted(v for v in program.literals() if v not in LITERALS)
    formulas: list[Expr] = []
    for x in ints:
        seen = _observed(states, x.name)
        constants = list(dict.fromkeys(([seen[0], seen[-1]] if seen else []) + literals))
        formulas += unary_int_templates(x, constants)
        formulas += set_template(x, seen)
    for i, x in enumerate(ints):
        for y in ints[i + 1:]:
            formulas += pair_templates(x, y)
    for a in arrays:
        formulas += array_templates(a)
    for x in ints:
        for a in arrays:
            formulas += mixed_templates(x, a)
    for b in bools:
        formulas += bool_templates(b)
    out: list[Candidate] = []
    keys: set[str] = set()
    for f in formulas:
        k = formula_key(f)
        if k not in keys:
            keys.add(k)
            out.append(Candidate(site.id, f, TEMPLATE))
    return out


def filter_by_suite(candidates: Iterable[Candidate], suite: TestSuite) -> list[Candidate]:
    """Candidates holding at every loop-head state of `suite`, marked
    Surviving; the others are marked Falsified."""
    traces = suite.traces()
    states_by_loop: dict[int, list] = {}
    kept: list[Candidate] = []
    for c in candidates:
        states = states_by_loop.get(c.loop_id)
        if states is None:
            states = states_by_loop[c.loop_id] = site_states(traces, c.loop_id)
        if holds_on_states(c.formula, states):
            if c.status in (Status.FRESH, Status.UNPROVED):
                c.mark(Status.SURVIVING)
            kept.append(c)
        else:
            c.mark(Status.FALSIFIED)
    return kept
