from __future__ import annotations

from typing import Optional

from .ast import (
    ARITH_OPS,
    Assign,
    Binary,
    BoolLit,
    Call,
    Expr,
    If,
    Index,
    IntLit,
    Length,
    NullLit,
    Old,
    Program,
    Quant,
    Result,
    Skip,
    Store,
    Type,
    Unary,
    Var,
    While,
    children as _kids,
    walk_stmts,
)
from .errors import TypeError_, TypeErrors
from .predicates import LIBRARY
from .printer import show

INT, BOOL, ARRAY, NULL = Type.INT, Type.BOOL, Type.ARRAY, Type.NULL


class _Checker:
    def __init__(self, var_types: dict[str, Type], result: Optional[Type]):
        self.var_types = var_types
        self.result = result
        self.errors: list[TypeError_] = []

    def fail(self, e: Expr, msg: str) -> None:
        self.errors.append(TypeError_(f"{msg} in `{show(e)}`"))

    def expect(self, e: Expr, want: Type, bound: dict[str, Type]) -> None:
        got = self.infer(e, bound)
        if got is not None and got != want:
            self.fail(e, f"expected {want}, found {got}")

    def infer(self, e: Expr, bound: Optional[dict[str, Type]] = None) -> Optional[Type]:
        """Return the type of `e`, recording errors; None means unknown."""
        bound = bound or {}
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, NullLit):
            return NULL
        if isinstance(e, Var):
            t = bound.get(e.name, self.var_types.get(e.name))
            if t is None:
                self.fail(e, f"undeclared {e.name!r}")
            return t
        if isinstance(e, Result):
            if self.result is None:
                self.fail(e, "\\result in a method without a result")
            return self.result
        if isinstance(e, Old):
            return self.infer(e.expr, bound)
        if isinstance(e, Unary):
            want = INT if e.op == "-" else BOOL
            self.expect(e.operand, want, bound)
            return want
        if isinstance(e, Binary):
            return self.infer_binary(e, bound)
        if isinstance(e, Index):
            self.expect(e.array, ARRAY, bound)
            self.expect(e.index, INT, bound)
            return INT
        if isinstance(e, Length):
            self.expect(e.array, ARRAY, bound)
            return INT
        if isinstance(e, Quant):
            self.expect(e.lo, INT, bound)
            self.expect(e.hi, INT, bound)
            self.expect(e.body, BOOL, {**bound, e.var: INT})
            return BOOL
        if isinstance(e, Call):
            pred = LIBRARY.get(e.name)
            if pred is None:
                self.fail(e, f"unknown predicate {e.name!r}")
                return BOOL
            if len(e.args) != pred.arity:
                self.fail(e, f"{e.name} expects {pred.arity} arguments, got {len(e.args)}")
                return BOOL
            for arg, (_, t) in zip(e.args, pred.params):
                self.expect(arg, t, bound)
            return BOOL
        self.fail(e, "unknown node")
        return None

    def infer_binary(self, e: Binary, bound: dict[str, Type]) -> Optional[Type]:
        if e.op in ARITH_OPS:
            self.expect(e.left, INT, bound)
            self.expect(e.right, INT, bound)
            return INT
        if e.op in ("<", "<=", ">", ">="):
            self.expect(e.left, INT, bound)
            self.expect(e.right, INT, bound)
            return BOOL
        if e.op in ("&&", "||", "==>"):
            self.expect(e.left, BOOL, bound)
            self.expect(e.right, BOOL, bound)
            return BOOL
        # == and !=
        lt = self.infer(e.left, bound)
        rt = self.infer(e.right, bound)
        if lt is None or rt is None:
            return BOOL
        pair = {lt, rt}
        if lt == rt and lt in (INT, BOOL):
            return BOOL
        if pair == {ARRAY, NULL}:
            return BOOL
        self.fail(e, f"cannot compare {lt} with {rt}")
        return BOOL


def type_of(e: Expr, var_types: dict[str, Type], result: Optional[Type] = None,
            bound: Optional[dict[str, Type]] = None) -> Optional[Type]:
    checker = _Checker(var_types, result)
    t = checker.infer(e, bound)
    return None if checker.errors else t


def check_formula(e: Expr, var_types: dict[str, Type], result: Optional[Type] = None) -> list[TypeError_]:
    checker = _Checker(var_types, result)
    checker.expect(e, BOOL, {})
    return checker.errors


def typecheck(program: Program) -> Program:
    """Check every node of `program`; raise TypeErrors listing all failures."""
    var_types = program.var_types
    result_t = program.result[1] if program.result else None
    c = _Checker(var_types, result_t)
    for name, t in program.locals:
        if t == ARRAY:
            c.errors.append(TypeError_(f"local {name!r} cannot be an array"))
    for clause in program.pre + program.post:
        c.expect(clause, BOOL, {})
    for s in walk_stmts(program.body):
        if isinstance(s, Assign):
            want = var_types.get(s.target)
            if want == ARRAY:
                c.errors.append(TypeError_(f"whole-array assignment to {s.target!r} is not supported"))
            elif want is not None:
                c.expect(s.rhs, want, {})
        elif isinstance(s, Store):
            if var_types.get(s.array) != ARRAY:
                c.errors.append(TypeError_(f"{s.array!r} is not an array"))
            c.expect(s.index, INT, {})
            c.expect(s.rhs, INT, {})
        elif isinstance(s, If):
            c.expect(s.cond, BOOL, {})
        elif isinstance(s, While):
            c.expect(s.cond, BOOL, {})
            for inv in s.invariants:
                c.expect(inv, BOOL, {})
        elif isinstance(s, Skip):
            pass
    if c.errors:
        raise TypeErrors(c.errors)
    return program


def node_type(e: Expr, var_types: dict[str, Type], result: Optional[Type] = None,
              bound: frozenset[str] = frozenset()) -> Optional[Type]:
    """Structural type of a node of an already well-typed formula."""
    if isinstance(e, IntLit):
        return INT
    if isinstance(e, (BoolLit, Quant, Call)):
        return BOOL
    if isinstance(e, NullLit):
        return NULL
    if isinstance(e, Var):
        return INT if e.name in bound else var_types.get(e.name)
    if isinstance(e, Result):
        return result
    if isinstance(e, Old):
        return node_type(e.expr, var_types, result, bound)
    if isinstance(e, Unary):
        return INT if e.op == "-" else BOOL
    if isinstance(e, Binary):
        return INT if e.op in ARITH_OPS else BOOL
    if isinstance(e, (Index, Length)):
        return INT
    return None


def subexpressions(f: Expr, t: Type, var_types: dict[str, Type],
                   result: Optional[Type] = None) -> list[tuple[tuple[int, ...], Expr]]:
    """Every occurrence of a `t`-typed node of `f`, by tree path, in preorder."""
    out: list[tuple[tuple[int, ...], Expr]] = []

    def visit(e: Expr, path: tuple[int, ...], bound: frozenset[str]) -> None:
        if node_type(e, var_types, result, bound) == t:
            out.append((path, e))
        if isinstance(e, Quant):
            visit(e.lo, path + (0,), bound)
            visit(e.hi, path + (1,), bound)
            visit(e.body, path + (2,), bound | {e.var})
            return
        for i, c in enumerate(_kids(e)):
            visit(c, path + (i,), bound)

    visit(f, (), frozenset())
    return out
