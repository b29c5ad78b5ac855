"""Independent second route to formula validity through the z3 Python API.

The production prover writes SMT-LIB text for a solver subprocess. This
module builds z3 terms in memory from the AST instead, with the predicates
written out by hand, so a disagreement between the two points at a bug in one
of the encoders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import z3

from forge.lang.ast import (
    Binary,
    BoolLit,
    Call,
    Expr,
    Index,
    IntLit,
    Length,
    NullLit,
    Old,
    Quant,
    Result,
    Type,
    Unary,
    Var,
)


@dataclass(frozen=True)
class Arr:
    null: z3.BoolRef
    length: z3.ArithRef
    data: z3.ArrayRef


def _tdiv(x, y):
    q = x / y  # z3 integer division rounds toward negative infinity for y > 0
    return z3.If(x >= 0, q, -((-x) / y))


def _tmod(x, y):
    return x - y * _tdiv(x, y)


def _within(a: Arr, lo, hi):
    return z3.And(z3.Not(a.null), 0 <= lo, lo <= hi, hi <= a.length)


def _sorted(a: Arr, lo, hi):
    i, j = z3.Ints("si sj")
    return z3.ForAll([i, j], z3.Implies(z3.And(lo <= i, i <= j, j < hi),
                                        z3.Select(a.data, i) <= z3.Select(a.data, j)))


def _has(a: Arr, lo, hi, key):
    i = z3.Int("hi_")
    return z3.Exists([i], z3.And(lo <= i, i < hi, z3.Select(a.data, i) == key))


PREDICATES = {"within": _within, "sorted": _sorted, "has": _has}


class Translator:
    def __init__(self, var_types: Mapping[str, Type]):
        self.state: dict[str, object] = {}
        self.old: dict[str, object] = {}
        self.side: list[z3.BoolRef] = []
        self.counter = 0
        for name, t in var_types.items():
            if t == Type.ARRAY:
                null, length = z3.Bool(f"{name}.null"), z3.Int(f"{name}.len")
                self.side.append(length >= 0)
                self.state[name] = Arr(null, length, z3.Array(f"{name}.data", z3.IntSort(), z3.IntSort()))
                self.old[name] = Arr(null, length, z3.Array(f"{name}.old", z3.IntSort(), z3.IntSort()))
            elif t == Type.BOOL:
                self.state[name], self.old[name] = z3.Bool(name), z3.Bool(f"{name}.old")
            else:
                self.state[name], self.old[name] = z3.Int(name), z3.Int(f"{name}.old")

    def tr(self, e: Expr, env: Mapping[str, object], old: Mapping[str, object]):
        if isinstance(e, IntLit):
            return z3.IntVal(e.value)
        if isinstance(e, BoolLit):
            return z3.BoolVal(e.value)
        if isinstance(e, Var):
            return env[e.name]
        if isinstance(e, Old):
            return self.tr(e.expr, {**env, **old}, old)
        if isinstance(e, Result):
            raise ValueError("\\result has no meaning at a loop head")
        if isinstance(e, Unary):
            x = self.tr(e.operand, env, old)
            return -x if e.op == "-" else z3.Not(x)
        if isinstance(e, Index):
            return z3.Select(self.tr(e.array, env, old).data, self.tr(e.index, env, old))
        if isinstance(e, Length):
            return self.tr(e.array, env, old).length
        if isinstance(e, Quant):
            self.counter += 1
            q = z3.Int(f"{e.var}!{self.counter}")
            lo, hi = self.tr(e.lo, env, old), self.tr(e.hi, env, old)
            body = self.tr(e.body, {**env, e.var: q}, old)
            rng = z3.And(lo <= q, q < hi)
            if e.kind == "forall":
                return z3.ForAll([q], z3.Implies(rng, body))
            return z3.Exists([q], z3.And(rng, body))
        if isinstance(e, Call):
            return PREDICATES[e.name](*(self.tr(a, env, old) for a in e.args))
        if isinstance(e, Binary):
            return self.binary(e, env, old)
        raise ValueError(f"cannot translate {e!r}")

    def binary(self, e: Binary, env, old):
        if e.op in ("==", "!=") and (isinstance(e.left, NullLit) or isinstance(e.right, NullLit)):
            other = e.right if isinstance(e.left, NullLit) else e.left
            t = z3.BoolVal(True) if isinstance(other, NullLit) else self.tr(other, env, old).null
            return t if e.op == "==" else z3.Not(t)
        x, y = self.tr(e.left, env, old), self.tr(e.right, env, old)
        ops = {
            "+": lambda: x + y, "-": lambda: x - y, "*": lambda: x * y,
            "/": lambda: _tdiv(x, y), "%": lambda: _tmod(x, y),
            "<": lambda: x < y, "<=": lambda: x <= y, ">": lambda: x > y, ">=": lambda: x >= y,
            "==": lambda: x == y, "!=": lambda: x != y,
            "&&": lambda: z3.And(x, y), "||": lambda: z3.Or(x, y), "==>": lambda: z3.Implies(x, y),
        }
        return ops[e.op]()


def entailed(var_types: Mapping[str, Type], assumptions: Sequence[Expr], goal: Expr,
             timeout_ms: int = 20000) -> str:
    """"valid", "invalid" or "unknown" for [assumptions] ==> goal, with every
    variable unconstrained and arrays sharing null flag and length with their
    entry copies."""
    t = Translator(var_types)
    s = z3.Solver()
    s.set("timeout", timeout_ms)
    for c in t.side:
        s.add(c)
    for a in assumptions:
        s.add(t.tr(a, t.state, t.old))
    s.add(z3.Not(t.tr(goal, t.state, t.old)))
    r = s.check()
    return "valid" if r == z3.unsat else "invalid" if r == z3.sat else "unknown"
