"""Built-in model-based predicate library.

Every predicate has two meanings that must agree: an executable routine used
by the interpreter, and a quantified definition used by the prover.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .ast import Expr, Type


@dataclass(frozen=True)
class PredicateDef:
    name: str
    params: tuple[tuple[str, Type], ...]
    domain_pre: str
    logic_body: str
    exec_body: Callable[..., bool]
    collection: str = "TArrays"

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def domain_formula(self) -> Expr:
        return _parsed(self.name, "domain", self.domain_pre)

    @property
    def logic_formula(self) -> Expr:
        return _parsed(self.name, "logic", self.logic_body)


_cache: dict[tuple[str, str], Expr] = {}


def _parsed(name: str, which: str, text: str) -> Expr:
    key = (name, which)
    if key not in _cache:
        from .parser import parse_formula

        _cache[key] = parse_formula(text, predicates=set(LIBRARY))
    return _cache[key]


def _within(a: Optional[list[int]], lo: int, hi: int) -> bool:
    return a is not None and 0 <= lo <= hi <= len(a)


def _sorted(a: list[int], lo: int, hi: int) -> bool:
    i = lo
    while i + 1 < hi:
        if a[i] > a[i + 1]:
            return False
        i += 1
    return True


def _has(a: list[int], lo: int, hi: int, key: int) -> bool:
    for i in range(lo, hi):
        if a[i] == key:
            return True
    return False


_ARR, _INT = Type.ARRAY, Type.INT

LIBRARY: dict[str, PredicateDef] = {
    p.name: p
    for p in (
        PredicateDef(
            "within",
            (("a", _ARR), ("lo", _INT), ("hi", _INT)),
            "true",
            "a != null && 0 <= lo && lo <= hi && hi <= a.length",
            _within,
        ),
        # Pairwise form: equivalent to the adjacent-pair check in exec_body on
        # every finite array, but usable by the prover without induction.
        PredicateDef(
            "sorted",
            (("a", _ARR), ("lo", _INT), ("hi", _INT)),
            "within(a, lo, hi)",
            "forall p_i in [lo, hi) :: forall p_j in [p_i, hi) :: a[p_i] <= a[p_j]",
            _sorted,
        ),
        PredicateDef(
            "has",
            (("a", _ARR), ("lo", _INT), ("hi", _INT), ("key", _INT)),
            "within(a, lo, hi)",
            "exists p_i in [lo, hi) :: a[p_i] == key",
            _has,
        ),
    )
}


def collections_of(names: set[str]) -> set[str]:
    return {LIBRARY[n].collection for n in names if n in LIBRARY}


def in_collections(collections: set[str]) -> list[PredicateDef]:
    return [p for p in LIBRARY.values() if p.collection in collections]
