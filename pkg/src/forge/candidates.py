"""Candidate invariants shared by the miners, the prover and the driver."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .lang.ast import Expr
from .lang.normalize import formula_key
from .lang.printer import show


class Status(enum.Enum):
    FRESH = "fresh"
    SURVIVING = "surviving"
    PROVED = "proved"
    FALSIFIED = "falsified"
    UNPROVED = "unproved"


# PROVED may fall back to UNPROVED when a later Houdini round cannot
# re-establish it (solver incompleteness under a larger hypothesis set).
_ALLOWED = {
    Status.FRESH: {Status.SURVIVING, Status.FALSIFIED},
    Status.SURVIVING: {Status.PROVED, Status.FALSIFIED, Status.UNPROVED},
    Status.PROVED: {Status.UNPROVED},
    Status.UNPROVED: {Status.SURVIVING, Status.FALSIFIED, Status.PROVED},
    Status.FALSIFIED: set(),
}


class IllegalTransition(Exception):
    pass


@dataclass(frozen=True)
class Origin:
    kind: str  # "template", "mutation" or "golden"
    wave: Optional[int] = None
    detail: str = ""

    def label(self) -> str:
        return f"wave {self.wave}" if self.kind == "mutation" else self.kind


TEMPLATE = Origin("template")


@dataclass(eq=False)
class Candidate:
    loop_id: int
    formula: Expr
    origin: Origin = TEMPLATE
    status: Status = Status.FRESH
    history: list[Status] = field(default_factory=list, repr=False)

    @cached_property
    def key(self) -> str:
        return formula_key(self.formula)

    @property
    def ident(self) -> tuple[int, str]:
        return (self.loop_id, self.key)

    def mark(self, status: Status) -> None:
        if status == self.status:
            return
        if status not in _ALLOWED[self.status]:
            raise IllegalTransition(f"{self.status.value} -> {status.value} for {show(self.formula)}")
        self.history.append(self.status)
        self.status = status

    def text(self) -> str:
        return show(self.formula)

    def __repr__(self) -> str:
        return f"Candidate(loop={self.loop_id}, {self.text()!r}, {self.origin.label()}, {self.status.value})"


def sort_candidates(cands) -> list[Candidate]:
    return sorted(cands, key=lambda c: c.ident)
