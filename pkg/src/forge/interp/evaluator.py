"""Runtime evaluation of expressions and formulas.

Formulas are translated once into Python source and compiled to a closure
`fn(v, o, r)`, where `v` maps variable names to current values, `o` holds the
method-entry snapshot used by `\\old`, and `r` is the `\\result` value.
Evaluation is strict: a null dereference, an out-of-range index, a zero
divisor, or a predicate call outside its domain raises DefinednessError.
"""

from __future__ import annotations

from typing import Any, Callable, Mapping, Optional

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


class DefinednessError(Exception):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(kind)


def _idx(a, i):
    if a is None:
        raise DefinednessError("null")
    if i < 0 or i >= len(a):
        raise DefinednessError("bounds")
    return a[i]


def _len(a):
    if a is None:
        raise DefinednessError("null")
    return len(a)


def tdiv(x: int, y: int) -> int:
    """Integer division truncating toward zero."""
    if y == 0:
        raise DefinednessError("division")
    q = abs(x) // abs(y)
    return q if (x >= 0) == (y > 0) else -q


def tmod(x: int, y: int) -> int:
    return x - y * tdiv(x, y)


class _PredicateCalls:
    """Checks each library predicate's domain before running its body."""

    def __init__(self) -> None:
        self._domains: dict[str, Callable] = {}

    def __call__(self, name: str, *args):
        pred = LIBRARY[name]
        domain = self._domains.get(name)
        if domain is None:
            domain = compile_formula(pred.domain_formula)
            self._domains[name] = domain
        env = {p: a for (p, _), a in zip(pred.params, args)}
        if not domain(env, env, None):
            raise DefinednessError(f"domain of {name}")
        return pred.exec_body(*args)


_CALL = _PredicateCalls()

_GLOBALS = {"_idx": _idx, "_len": _len, "_div": tdiv, "_mod": tmod, "_call": _CALL, "__builtins__": {"all": all, "any": any, "range": range}}

_PYOP = {"&&": "and", "||": "or", "+": "+", "-": "-", "*": "*", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _src(e: Expr, env: str, bound: frozenset[str]) -> str:
    if isinstance(e, IntLit):
        return f"({e.value})"
    if isinstance(e, BoolLit):
        return "True" if e.value else "False"
    if isinstance(e, NullLit):
        return "None"
    if isinstance(e, Var):
        return f"_b_{e.name}" if e.name in bound else f"{env}[{e.name!r}]"
    if isinstance(e, Result):
        return "r"
    if isinstance(e, Old):
        return _src(e.expr, "o", bound)
    if isinstance(e, Unary):
        inner = _src(e.operand, env, bound)
        return f"(-{inner})" if e.op == "-" else f"(not {inner})"
    if isinstance(e, Binary):
        left = _src(e.left, env, bound)
        right = _src(e.right, env, bound)
        if e.op == "==>":
            return f"((not {left}) or {right})"
        if e.op == "/":
            return f"_div({left}, {right})"
        if e.op == "%":
            return f"_mod({left}, {right})"
        if e.op in ("==", "!="):
            if isinstance(e.left, NullLit) or isinstance(e.right, NullLit):
                op = "is" if e.op == "==" else "is not"
            else:
                op = e.op
            return f"({left} {op} {right})"
        return f"({left} {_PYOP[e.op]} {right})"
    if isinstance(e, Index):
        return f"_idx({_src(e.array, env, bound)}, {_src(e.index, env, bound)})"
    if isinstance(e, Length):
        return f"_len({_src(e.array, env, bound)})"
    if isinstance(e, Quant):
        lo = _src(e.lo, env, bound)
        hi = _src(e.hi, env, bound)
        body = _src(e.body, env, bound | {e.var})
        fn = "all" if e.kind == "forall" else "any"
        return f"{fn}({body} for _b_{e.var} in range({lo}, {hi}))"
    if isinstance(e, Call):
        args = "".join(", " + _src(a, env, bound) for a in e.args)
        return f"_call({e.name!r}{args})"
    raise TypeError(f"cannot evaluate {e!r}")


_compiled: dict[Expr, Callable] = {}


def compile_formula(e: Expr, cache: bool = True) -> Callable[[Mapping[str, Any], Mapping[str, Any], Any], Any]:
    """Closure evaluating `e`; `cache=False` skips the memo for one-off formulas."""
    fn = _compiled.get(e) if cache else None
    if fn is None:
        code = f"lambda v, o, r: {_src(e, 'v', frozenset())}"
        fn = eval(code, _GLOBALS)  # noqa: S307 - source is generated from a typed AST
        if cache:
            _compiled[e] = fn
    return fn


def eval_expr(e: Expr, v: Mapping[str, Any], old: Optional[Mapping[str, Any]] = None, result: Any = None):
    return compile_formula(e)(v, old if old is not None else v, result)


def holds(e: Expr, v: Mapping[str, Any], old: Optional[Mapping[str, Any]] = None, result: Any = None) -> bool:
    """True iff `e` evaluates to true; any DefinednessError counts as false."""
    try:
        return bool(compile_formula(e)(v, old if old is not None else v, result))
    except DefinednessError:
        return False
    except RecursionError:
        return False
