"""The mutation operators: Int substitution, aging and weakening.

Each `*_raw` function returns every mutant the operator produces on one
formula, before any normalization or deduplication, so raw counts can be
checked against closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from ..lang.ast import Binary, Expr, IntLit, Type, negate, node_at, replace_at
from ..lang.normalize import formula_key
from ..lang.typecheck import subexpressions


def int_paths(m: Expr, var_types: Mapping[str, Type], result: Optional[Type] = None):
    return [p for p, _ in subexpressions(m, Type.INT, dict(var_types), result)]


def substitution_raw(m: Expr, pool: Sequence[Expr], var_types, result=None) -> Iterator[tuple[Expr, str]]:
    """One mutant per (Int occurrence, pool expression) pair."""
    for path in int_paths(m, var_types, result):
        for e in pool:
            yield replace_at(m, path, e), f"sub{list(path)}"


def aging_raw(m: Expr, var_types, result=None) -> Iterator[tuple[Expr, str]]:
    """Two mutants per Int occurrence: the occurrence plus one and minus one."""
    for path in int_paths(m, var_types, result):
        occ = node_at(m, path)
        yield replace_at(m, path, Binary("+", occ, IntLit(1))), f"age{list(path)}+1"
        yield replace_at(m, path, Binary("-", occ, IntLit(1))), f"age{list(path)}-1"


def weakening_raw(m: Expr, bools: Sequence[Expr]) -> Iterator[tuple[Expr, str]]:
    """`b ==> m` and `!b ==> m` for every pooled Bool expression `b`."""
    for k, b in enumerate(bools):
        yield Binary("==>", b, m), f"weak{k}+"
        yield Binary("==>", negate(b), m), f"weak{k}-"


@dataclass
class Mutant:
    formula: Expr
    wave: Optional[int]
    chain: tuple[str, ...]


@dataclass
class MutantSet:
    """Mutants keyed by normalized text, keeping the first derivation found."""

    items: dict[str, Mutant] = field(default_factory=dict)

    def add(self, formula: Expr, wave: Optional[int], chain: tuple[str, ...]) -> bool:
        key = formula_key(formula)
        if key in self.items:
            return False
        self.items[key] = Mutant(formula, wave, chain)
        return True

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items.values())

    def keys(self):
        return self.items.keys()

    def formulas(self) -> list[Expr]:
        return [m.formula for m in self.items.values()]


def _collect(pairs: Iterable[tuple[Expr, str]], wave=None, chain=()) -> MutantSet:
    out = MutantSet()
    for f, step in pairs:
        out.add(f, wave, chain + (step,))
    return out


def apply_substitution(m: Expr, e: Expr, var_types, result=None) -> MutantSet:
    return _collect(substitution_raw(m, [e], var_types, result))


def apply_aging(m: Expr, var_types, result=None) -> MutantSet:
    return _collect(aging_raw(m, var_types, result))


def apply_weakening(m: Expr, b: Expr) -> MutantSet:
    return _collect(weakening_raw(m, [b]))
