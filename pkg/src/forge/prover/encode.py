"""Translation of formulas into SMT-LIB terms.

An array variable is represented by three terms: a Bool null flag, an Int
length and an `(Array Int Int)` content map. Predicate calls are inlined from
their logical definitions. Reads outside an array's bounds denote an
unspecified value, so the logical meaning of every formula is total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from ..lang.ast import (
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
    Unary,
    Var,
)
from ..lang.predicates import LIBRARY


class EncodingError(Exception):
    pass


@dataclass(frozen=True)
class ArrayVal:
    null: str
    length: str
    data: str


Value = Union[str, ArrayVal]
State = Mapping[str, Value]

PRELUDE = """(set-logic ALL)
(define-fun tdiv ((x Int) (y Int)) Int (ite (>= x 0) (div x y) (- (div (- x) y))))
(define-fun tmod ((x Int) (y Int)) Int (- x (* y (tdiv x y))))
"""

_SMT_OP = {
    "+": "+", "-": "-", "*": "*", "/": "tdiv", "%": "tmod",
    "<": "<", "<=": "<=", ">": ">", ">=": ">=", "==": "=",
    "&&": "and", "||": "or", "==>": "=>",
}


def int_term(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


class Encoder:
    """Encodes formulas against a current state, an entry state and a result."""

    def __init__(self) -> None:
        self.counter = 0

    def fresh_bound(self, name: str) -> str:
        self.counter += 1
        return f"{name}%{self.counter}"

    def term(self, e: Expr, state: State, old: State, result: Optional[Value] = None,
             bound: Optional[dict[str, Value]] = None) -> Value:
        bound = bound or {}
        if isinstance(e, IntLit):
            return int_term(e.value)
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, NullLit):
            raise EncodingError("bare null outside a comparison")
        if isinstance(e, Var):
            if e.name in bound:
                return bound[e.name]
            if e.name not in state:
                raise EncodingError(f"unbound variable {e.name!r}")
            return state[e.name]
        if isinstance(e, Result):
            if result is None:
                raise EncodingError("\\result outside a postcondition")
            return result
        if isinstance(e, Old):
            return self.term(e.expr, old, old, result, bound)
        if isinstance(e, Unary):
            inner = self.term(e.operand, state, old, result, bound)
            return f"(- {inner})" if e.op == "-" else f"(not {inner})"
        if isinstance(e, Binary):
            return self._binary(e, state, old, result, bound)
        if isinstance(e, Index):
            arr = self.array(e.array, state, old, result, bound)
            return f"(select {arr.data} {self.term(e.index, state, old, result, bound)})"
        if isinstance(e, Length):
            return self.array(e.array, state, old, result, bound).length
        if isinstance(e, Quant):
            lo = self.term(e.lo, state, old, result, bound)
            hi = self.term(e.hi, state, old, result, bound)
            q = self.fresh_bound(e.var)
            body = self.term(e.body, state, old, result, {**bound, e.var: q})
            rng = f"(and (<= {lo} {q}) (< {q} {hi}))"
            if e.kind == "forall":
                return f"(forall (({q} Int)) (=> {rng} {body}))"
            return f"(exists (({q} Int)) (and {rng} {body}))"
        if isinstance(e, Call):
            pred = LIBRARY.get(e.name)
            if pred is None:
                raise EncodingError(f"unknown predicate {e.name!r}")
            env = {
                pname: self.term(arg, state, old, result, bound)
                for (pname, _), arg in zip(pred.params, e.args)
            }
            return self.term(pred.logic_formula, env, env, None, {})
        raise EncodingError(f"no logical translation for {e!r}")

    def array(self, e: Expr, state, old, result, bound) -> ArrayVal:
        v = self.term(e, state, old, result, bound)
        if not isinstance(v, ArrayVal):
            raise EncodingError("expected an array")
        return v

    def _binary(self, e: Binary, state, old, result, bound) -> str:
        if e.op in ("==", "!="):
            if isinstance(e.left, NullLit) or isinstance(e.right, NullLit):
                if isinstance(e.left, NullLit) and isinstance(e.right, NullLit):
                    t = "true"
                else:
                    other = e.right if isinstance(e.left, NullLit) else e.left
                    t = self.array(other, state, old, result, bound).null
                return t if e.op == "==" else f"(not {t})"
        left = self.term(e.left, state, old, result, bound)
        right = self.term(e.right, state, old, result, bound)
        if e.op == "!=":
            return f"(not (= {left} {right}))"
        return f"({_SMT_OP[e.op]} {left} {right})"


def conj_terms(terms) -> str:
    terms = list(terms)
    if not terms:
        return "true"
    if len(terms) == 1:
        return terms[0]
    return f"(and {' '.join(terms)})"
