"""Expression, statement and program nodes of the annotated mini-language.

All nodes are frozen dataclasses, so structural equality and hashing come for
free. Child expressions are stored in tuples to keep nodes hashable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Union


class Type(enum.Enum):
    INT = "int"
    BOOL = "bool"
    ARRAY = "int[]"
    NULL = "null"  # type of the `null` literal only; never declared

    def __str__(self) -> str:
        return self.value


# --------------------------------------------------------------------------
# Expressions (shared by program code and specification formulas)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class NullLit:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Old:
    """`\\old(e)`: `e` evaluated in the method-entry state."""

    expr: "Expr"


@dataclass(frozen=True)
class Result:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Index:
    array: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Length:
    array: "Expr"


@dataclass(frozen=True)
class Quant:
    """Bounded quantifier over the half-open range `[lo, hi)`."""

    kind: str  # "forall" or "exists"
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = Union[IntLit, BoolLit, NullLit, Var, Old, Result, Unary, Binary, Index, Length, Quant, Call]
Formula = Expr

ARITH_OPS = ("+", "-", "*", "/", "%")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("&&", "||", "==>")

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Old,)):
        return (e.expr,)
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Index):
        return (e.array, e.index)
    if isinstance(e, Length):
        return (e.array,)
    if isinstance(e, Quant):
        return (e.lo, e.hi, e.body)
    if isinstance(e, Call):
        return e.args
    return ()


def with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    if isinstance(e, Old):
        return Old(kids[0])
    if isinstance(e, Unary):
        return Unary(e.op, kids[0])
    if isinstance(e, Binary):
        return Binary(e.op, kids[0], kids[1])
    if isinstance(e, Index):
        return Index(kids[0], kids[1])
    if isinstance(e, Length):
        return Length(kids[0])
    if isinstance(e, Quant):
        return Quant(e.kind, e.var, kids[0], kids[1], kids[2])
    if isinstance(e, Call):
        return Call(e.name, tuple(kids))
    return e


Path = tuple[int, ...]


def walk(e: Expr, path: Path = ()) -> Iterator[tuple[Path, Expr]]:
    """Preorder traversal yielding `(path, node)` pairs."""
    yield path, e
    for i, c in enumerate(children(e)):
        yield from walk(c, path + (i,))


def node_at(e: Expr, path: Path) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def replace_at(e: Expr, path: Path, new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(e))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(e, tuple(kids))


def free_vars(e: Expr, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(e, Var):
        return set() if e.name in bound else {e.name}
    if isinstance(e, Quant):
        out = free_vars(e.lo, bound) | free_vars(e.hi, bound)
        return out | free_vars(e.body, bound | {e.var})
    out: set[str] = set()
    for c in children(e):
        out |= free_vars(c, bound)
    return out


def contains(e: Expr, pred) -> bool:
    return any(pred(n) for _, n in walk(e))


def mentions_result(e: Expr) -> bool:
    return contains(e, lambda n: isinstance(n, Result))


def conj(parts: list[Expr]) -> Expr:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&&", out, p)
    return out


def negate(e: Expr) -> Expr:
    if isinstance(e, Unary) and e.op == "!":
        return e.operand
    return Unary("!", e)


def int_literals(e: Expr) -> set[int]:
    return {n.value for _, n in walk(e) if isinstance(n, IntLit)}


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Expr


@dataclass(frozen=True)
class Store:
    array: str
    index: Expr
    rhs: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    orelse: "Stmt"
    branch_id: int = 0


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    site: int = 0
    # Golden annotations from the source; never fed to inference.
    invariants: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Seq:
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class Skip:
    pass


Stmt = Union[Assign, Store, If, While, Seq, Skip]


def stmt_children(s: Stmt) -> tuple[Stmt, ...]:
    if isinstance(s, If):
        return (s.then, s.orelse)
    if isinstance(s, While):
        return (s.body,)
    if isinstance(s, Seq):
        return s.stmts
    return ()


def walk_stmts(s: Stmt) -> Iterator[Stmt]:
    yield s
    for c in stmt_children(s):
        yield from walk_stmts(c)


def stmt_exprs(s: Stmt) -> Iterator[Expr]:
    """Expressions appearing directly in `s` and its sub-statements."""
    for node in walk_stmts(s):
        if isinstance(node, Assign):
            yield node.rhs
        elif isinstance(node, Store):
            yield node.index
            yield node.rhs
        elif isinstance(node, (If, While)):
            yield node.cond


def modified_vars(s: Stmt) -> frozenset[str]:
    out = set()
    for node in walk_stmts(s):
        if isinstance(node, Assign):
            out.add(node.target)
        elif isinstance(node, Store):
            out.add(node.array)
    return frozenset(out)


# --------------------------------------------------------------------------
# Programs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSite:
    id: int
    guard: Expr
    modified: frozenset[str]
    in_scope: tuple[str, ...]
    depth: int
    node: While = field(repr=False, compare=False)


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple[tuple[str, Type], ...]
    locals: tuple[tuple[str, Type], ...]
    body: Stmt
    pre: tuple[Expr, ...] = ()
    post: tuple[Expr, ...] = ()
    result: Optional[tuple[str, Type]] = None

    @property
    def var_types(self) -> dict[str, Type]:
        out = dict(self.params)
        out.update(self.locals)
        if self.result is not None:
            out[self.result[0]] = self.result[1]
        return out

    @property
    def declared(self) -> tuple[str, ...]:
        names = [n for n, _ in self.params]
        if self.result is not None:
            names.append(self.result[0])
        names.extend(n for n, _ in self.locals)
        return tuple(names)

    @cached_property
    def loops(self) -> tuple[LoopSite, ...]:
        sites: list[LoopSite] = []
        scope = self.declared

        def visit(s: Stmt, depth: int) -> None:
            if isinstance(s, While):
                sites.append(LoopSite(s.site, s.cond, modified_vars(s.body), scope, depth, s))
                visit(s.body, depth + 1)
                return
            for c in stmt_children(s):
                visit(c, depth)

        visit(self.body, 0)
        return tuple(sites)

    def loop(self, site: int) -> LoopSite:
        for lp in self.loops:
            if lp.id == site:
                return lp
        raise KeyError(site)

    def literals(self) -> set[int]:
        out: set[int] = set()
        for e in stmt_exprs(self.body):
            out |= int_literals(e)
        for e in self.pre + self.post:
            out |= int_literals(e)
        return out

    def golden(self) -> dict[int, list[Expr]]:
        return {lp.id: list(lp.node.invariants) for lp in self.loops}
