"""Expression pools available to the mutation operators at a loop head."""

from __future__ import annotations

import itertools

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..lang.ast import (
    Binary,
    Call,
    Expr,
    IntLit,
    Length,
    LoopSite,
    Old,
    Program,
    Quant,
    Type,
    Unary,
    Var,
    free_vars,
    mentions_result,
    walk,
)
from ..lang.normalize import formula_key
from ..lang.predicates import LIBRARY, PredicateDef, in_collections

LITERALS = (0, 1, -1)
EXTRACTION_CHOICES = 3


def _unique(items) -> list:
    seen = set()
    out = []
    for e in items:
        k = formula_key(e)
        if k not in seen:
            seen.add(k)
            out.append(e)
    return out


@dataclass
class ExpressionPool:
    ints: list[Expr] = field(default_factory=list)
    ints_parameterless: list[Expr] = field(default_factory=list)
    arrays: list[Expr] = field(default_factory=list)
    bools: list[Expr] = field(default_factory=list)
    collections: set[str] = field(default_factory=set)
    scope: frozenset[str] = frozenset()

    def closed(self, e: Expr) -> bool:
        """True iff `e` mentions only loop-scope variables and no `\\result`."""
        return free_vars(e) <= self.scope and not mentions_result(e)

    def int_pool(self, parameterless: bool) -> list[Expr]:
        return self.ints_parameterless if parameterless else self.ints


def build_pools(program: Program, site: LoopSite, post: Sequence[Expr]) -> ExpressionPool:
    types = program.var_types
    scope = [n for n in site.in_scope]
    int_vars = [Var(n) for n in scope if types[n] == Type.INT]
    array_vars = [Var(n) for n in scope if types[n] == Type.ARRAY]
    params = {n for n, _ in program.params}
    literals = [IntLit(v) for v in LITERALS]
    literals += [IntLit(v) for v in sorted(program.literals()) if v not in LITERALS]
    olds = [Old(v) for v in int_vars if v.name in params]
    lengths = [Length(a) for a in array_vars]
    pool = ExpressionPool(
        ints=_unique(int_vars + olds + literals + lengths),
        ints_parameterless=_unique(int_vars + literals),
        arrays=array_vars,
        scope=frozenset(scope),
    )
    for clause in post:
        for _, node in walk(clause):
            if isinstance(node, Call) and node.name in LIBRARY:
                pool.collections.add(LIBRARY[node.name].collection)
    return pool


def _q_calls(post: Sequence[Expr]) -> list[Call]:
    return [node for c in post for _, node in walk(c) if isinstance(node, Call)]


def _slot_choices(pred: PredicateDef, slot: int, calls: list[Call], pool: ExpressionPool) -> list[Expr]:
    """Int arguments for one slot, nearest to Q's own arguments first."""
    ranked: list[Expr] = []
    same = [c.args[slot] for c in calls if c.name == pred.name]
    others = [a for c in calls for a in c.args]
    for e in same + others + pool.ints_parameterless:
        if pool.closed(e):
            ranked.append(e)
    ints = [e for e in _unique(ranked) if not isinstance(e, Var) or e not in pool.arrays]
    return ints[:EXTRACTION_CHOICES]


def extract_predicates(pool: ExpressionPool, post: Sequence[Expr],
                       library: Optional[Sequence[PredicateDef]] = None) -> ExpressionPool:
    """Add negated and unnegated instantiations of every predicate from the
    collections mentioned in `post` to the Bool pool."""
    preds = list(library) if library is not None else in_collections(pool.collections)
    preds = [p for p in preds if p.collection in pool.collections]
    calls = _q_calls(post)
    bools: list[Expr] = []
    for pred in preds:
        slots: list[list[Expr]] = []
        for k, (_, t) in enumerate(pred.params):
            if t == Type.ARRAY:
                slots.append(list(pool.arrays))
            else:
                slots.append(_slot_choices(pred, k, calls, pool))
        if any(not s for s in slots):
            continue
        for args in itertools.product(*slots):
            call = Call(pred.name, tuple(args))
            bools += [call, Unary("!", call)]
    atoms = [a for a in top_level_atoms(post) if pool.closed(a)]
    pool.bools = _unique(pool.bools + bools + atoms)
    return pool


def top_level_atoms(post: Sequence[Expr]) -> list[Expr]:
    """Bool atoms of `post` reachable through connectives only."""
    out: list[Expr] = []

    def visit(e: Expr) -> None:
        if isinstance(e, Binary) and e.op in ("&&", "||", "==>"):
            visit(e.left)
            visit(e.right)
        elif isinstance(e, Unary) and e.op == "!":
            visit(e.operand)
        elif isinstance(e, Quant):
            return
        else:
            out.append(e)

    for c in post:
        visit(c)
    return out


def predicate_seeds(post: Sequence[Expr], scope: frozenset[str]) -> list[Expr]:
    """Predicate calls and quantified subformulas of `post`, each unnegated
    and negated. Subformulas using variables bound further out are skipped."""
    out: list[Expr] = []
    for c in post:
        for _, node in walk(c):
            if isinstance(node, (Call, Quant)) and free_vars(node) <= scope:
                out += [node, Unary("!", node)]
    return _unique(out)
