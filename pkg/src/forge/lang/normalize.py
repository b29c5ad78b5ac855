"""Syntactic normalization used to deduplicate candidate formulas.

Normalization only applies rewrites that preserve both the logical meaning and
the runtime definedness of a formula, so a normalized candidate survives
exactly the same traces as the original. In particular `&&` and `||` are not
reordered, since their left operand guards the right one at runtime.
"""

from __future__ import annotations

from .ast import (
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
    children,
    with_children,
)
from .printer import _ATOM, _PREC, _UNARY, _prec, show

_FLIP = {">": "<", ">=": "<="}
_NEGATED = {"<": "<=", "<=": "<", "==": "!=", "!=": "=="}
_COMMUTATIVE = ("==", "!=", "+", "*")


def _fold(op: str, x: int, y: int):
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    return None


def normalize(e: Expr) -> Expr:
    e = with_children(e, tuple(normalize(c) for c in children(e)))
    if isinstance(e, Unary):
        inner = e.operand
        if e.op == "-" and isinstance(inner, IntLit):
            return IntLit(-inner.value)
        if e.op == "!":
            if isinstance(inner, Unary) and inner.op == "!":
                return inner.operand
            if isinstance(inner, BoolLit):
                return BoolLit(not inner.value)
            if isinstance(inner, Binary) and inner.op in _NEGATED:
                op = _NEGATED[inner.op]
                if inner.op in ("<", "<="):
                    return normalize(Binary(op, inner.right, inner.left))
                return normalize(Binary(op, inner.left, inner.right))
        return e
    if not isinstance(e, Binary):
        return e
    op, left, right = e.op, e.left, e.right
    if op in _FLIP:
        op, left, right = _FLIP[op], right, left
    if op == "==>" and isinstance(left, BoolLit):
        return right if left.value else BoolLit(True)
    if isinstance(left, IntLit) and isinstance(right, IntLit):
        folded = _fold(op, left.value, right.value)
        if folded is not None:
            return IntLit(folded)
    if op in _COMMUTATIVE and show(right) < show(left):
        left, right = right, left
    return Binary(op, left, right)


def _rename_bound(e: Expr, mapping: dict[str, str], depth: int) -> Expr:
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name))
    if isinstance(e, Quant):
        fresh = f"${depth}"
        inner = {**mapping, e.var: fresh}
        return Quant(
            e.kind,
            fresh,
            _rename_bound(e.lo, mapping, depth),
            _rename_bound(e.hi, mapping, depth),
            _rename_bound(e.body, inner, depth + 1),
        )
    return with_children(e, tuple(_rename_bound(c, mapping, depth) for c in children(e)))


def _paren(e: Expr, text: str, ctx: int) -> str:
    return f"({text})" if _prec(e) < ctx else text


def _binary_text(op: str, left: Expr, right: Expr, lt: str, rt: str) -> str:
    p = _PREC[op]
    if op == "==>":
        return f"{_paren(left, lt, p + 1)} ==> {_paren(right, rt, p)}"
    if p == 4:
        return f"{_paren(left, lt, p + 1)} {op} {_paren(right, rt, p + 1)}"
    return f"{_paren(left, lt, p)} {op} {_paren(right, rt, p + 1)}"


def _canon(e: Expr, mapping: dict[str, str], depth: int) -> tuple[Expr, str]:
    """`_rename_bound`, `normalize` and `show` fused into one traversal."""
    t = type(e)
    if t is Var:
        name = mapping.get(e.name, e.name)
        return (e if name == e.name else Var(name)), name
    if t is IntLit:
        return e, str(e.value)
    if t is Binary:
        left, lt = _canon(e.left, mapping, depth)
        right, rt = _canon(e.right, mapping, depth)
        op = e.op
        if op in _FLIP:
            op, left, right, lt, rt = _FLIP[op], right, left, rt, lt
        if op == "==>" and type(left) is BoolLit:
            return (right, rt) if left.value else (BoolLit(True), "true")
        if type(left) is IntLit and type(right) is IntLit:
            folded = _fold(op, left.value, right.value)
            if folded is not None:
                return IntLit(folded), str(folded)
        if op in _COMMUTATIVE and rt < lt:
            left, right, lt, rt = right, left, rt, lt
        return Binary(op, left, right), _binary_text(op, left, right, lt, rt)
    if t is Unary:
        inner, it = _canon(e.operand, mapping, depth)
        if e.op == "-" and type(inner) is IntLit:
            return IntLit(-inner.value), str(-inner.value)
        if e.op == "!" and (type(inner) in (Unary, BoolLit) or
                            (type(inner) is Binary and inner.op in _NEGATED)):
            out = normalize(Unary("!", inner))
            return out, show(out)
        return Unary(e.op, inner), f"{e.op}{_paren(inner, it, _UNARY)}"
    if t is Index:
        arr, at = _canon(e.array, mapping, depth)
        idx, xt = _canon(e.index, mapping, depth)
        return Index(arr, idx), f"{_paren(arr, at, _ATOM)}[{xt}]"
    if t is Length:
        arr, at = _canon(e.array, mapping, depth)
        return Length(arr), f"{_paren(arr, at, _ATOM)}.length"
    if t is Call:
        pairs = [_canon(a, mapping, depth) for a in e.args]
        return Call(e.name, tuple(a for a, _ in pairs)), f"{e.name}({', '.join(x for _, x in pairs)})"
    if t is Quant:
        fresh = f"${depth}"
        lo, lt = _canon(e.lo, mapping, depth)
        hi, ht = _canon(e.hi, mapping, depth)
        body, bt = _canon(e.body, {**mapping, e.var: fresh}, depth + 1)
        return Quant(e.kind, fresh, lo, hi, body), f"{e.kind} {fresh} in [{lt}, {ht}) :: {bt}"
    if t is Old:
        inner, it = _canon(e.expr, mapping, depth)
        return Old(inner), f"\\old({it})"
    if t in (BoolLit, NullLit, Result):
        return e, show(e)
    raise TypeError(f"not an expression: {e!r}")


def formula_key(e: Expr) -> str:
    """Canonical text of `e`, equal for formulas identical up to normalization
    and the naming of bound variables."""
    return _canon(e, {}, 0)[1]


def formula_key_reference(e: Expr) -> str:
    """Unfused definition of `formula_key`, kept as a cross-check."""
    return show(normalize(_rename_bound(e, {}, 0)))
