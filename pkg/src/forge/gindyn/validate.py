"""Dynamic validation of mutants against tests, and tautology elimination."""

from __future__ import annotations

import logging
from typing import Sequence

from ..candidates import Candidate, Origin, Status
from ..interp import holds_on_states, site_states
from ..lang.ast import LoopSite, Program
from ..prover import Solver, tautologies
from ..testgen import TestSuite
from .operators import Mutant, MutantSet

log = logging.getLogger(__name__)


def _as_candidate(site: LoopSite, mut: Mutant) -> Candidate:
    return Candidate(site.id, mut.formula, Origin("mutation", mut.wave, " <- ".join(mut.chain)))


def dynamic_validate(mutants: MutantSet, suite: TestSuite, site: LoopSite,
                     batch_size: int = 1000) -> list[Candidate]:
    """Mutants that hold at every AtEntry/AtExit state of `site` in `suite`.

    Each mutant is checked on its own, so batching only bounds the working
    set and never changes the result. Output is ordered by normalized key.
    """
    if batch_size < 1:
        raise ValueError("batch size must be positive")
    states = site_states(suite.traces(), site.id)
    items = sorted(mutants.items.items())
    survivors: list[Candidate] = []
    for start in range(0, len(items), batch_size):
        for _, mut in items[start:start + batch_size]:
            if holds_on_states(mut.formula, states, cache=False):
                cand = _as_candidate(site, mut)
                cand.mark(Status.SURVIVING)
                survivors.append(cand)
    return survivors


def eliminate_tautologies(program: Program, survivors: Sequence[Candidate],
                          verified: Sequence[Candidate], solver: Solver
                          ) -> tuple[list[Candidate], list[Candidate]]:
    """Split `survivors` into (kept, removed); a survivor is removed iff the
    solver proves it from the verified invariants of its own loop alone."""
    kept: list[Candidate] = []
    removed: list[Candidate] = []
    by_loop: dict[int, list[Candidate]] = {}
    for c in survivors:
        by_loop.setdefault(c.loop_id, []).append(c)
    for lid, cands in sorted(by_loop.items()):
        assumptions = [v.formula for v in verified if v.loop_id == lid]
        verdicts = tautologies(program, lid, assumptions, [c.formula for c in cands], solver)
        for c, v in zip(cands, verdicts):
            if v.valid:
                removed.append(c)
            else:
                if v.kind != "invalid":
                    log.debug("tautology check inconclusive for %s: %s", c.text(), v.reason)
                kept.append(c)
    return kept, removed
