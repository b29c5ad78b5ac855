"""Houdini fixpoint, full proof attempts and tautology queries."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..candidates import Candidate, Status
from ..lang.ast import Expr, Program
from .solver import Solver, Verdict
from .vcgen import LOOP_KINDS, VC, generate_vcs, tautology_vcs

log = logging.getLogger(__name__)


def _dedup(cands: Sequence[Candidate]) -> list[Candidate]:
    seen: dict[str, Candidate] = {}
    for c in sorted(cands, key=lambda c: c.key):
        seen.setdefault(c.key, c)
    return list(seen.values())


def houdini(program: Program, candidates: Mapping[int, Sequence[Candidate]],
            solver: Solver) -> tuple[dict[int, list[Candidate]], list[Candidate]]:
    """Greatest subset of `candidates` that is inductive as a whole.

    Each round annotates every loop with all remaining candidates, checks
    Initiation and Preservation of each, and drops every candidate with a
    non-Valid obligation. Candidates are processed in normalized-key order,
    so the result does not depend on the input order.
    """
    current = {lid: _dedup(cs) for lid, cs in sorted(candidates.items())}
    rejected: list[Candidate] = []
    rounds = 0
    while True:
        rounds += 1
        invariants = {lid: [c.formula for c in cs] for lid, cs in current.items()}
        vcs = generate_vcs(program, invariants, only_loops=True)
        verdicts = solver.check_all(vcs)
        failing = {(vc.loop, vc.index) for vc, v in zip(vcs, verdicts) if not v.valid}
        if not failing:
            break
        for lid in list(current):
            keep = []
            for k, c in enumerate(current[lid]):
                (rejected if (lid, k) in failing else keep).append(c)
            current[lid] = keep
    for cs in current.values():
        for c in cs:
            c.mark(Status.PROVED)
    for c in rejected:
        c.mark(Status.UNPROVED)
    log.debug("houdini: %d rounds, %d proved, %d rejected", rounds,
              sum(len(cs) for cs in current.values()), len(rejected))
    return current, sorted(rejected, key=lambda c: c.ident)


@dataclass
class ProofResult:
    obligations: list[tuple[VC, Verdict]]

    @property
    def total(self) -> int:
        return len(self.obligations)

    @property
    def discharged(self) -> int:
        return sum(v.valid for _, v in self.obligations)

    @property
    def full_proof(self) -> bool:
        return all(v.valid for _, v in self.obligations)

    def program_obligations(self) -> list[tuple[VC, Verdict]]:
        """Postcondition and safety obligations, which exist independently of
        the invariants chosen."""
        return [(vc, v) for vc, v in self.obligations if vc.kind not in LOOP_KINDS]

    @property
    def program_discharged_pct(self) -> float:
        obs = self.program_obligations()
        if not obs:
            return 100.0
        return 100.0 * sum(v.valid for _, v in obs) / len(obs)

    def failures(self) -> list[tuple[VC, Verdict]]:
        return [(vc, v) for vc, v in self.obligations if not v.valid]


def prove_program(program: Program, invariants: Mapping[int, Sequence[Expr]],
                  solver: Solver) -> ProofResult:
    vcs = generate_vcs(program, invariants)
    return ProofResult(list(zip(vcs, solver.check_all(vcs))))


def tautologies(program: Program, loop_id: int, verified: Sequence[Expr],
                goals: Sequence[Expr], solver: Solver) -> list[Verdict]:
    """Per goal, whether it follows from `verified` alone."""
    if not goals:
        return []
    return solver.check_all(tautology_vcs(program, loop_id, verified, goals))


def inductive(program: Program, invariants: Mapping[int, Sequence[Expr]],
              solver: Optional[Solver] = None) -> bool:
    solver = solver or Solver()
    vcs = generate_vcs(program, invariants, only_loops=True)
    return all(v.valid for v in solver.check_all(vcs))
