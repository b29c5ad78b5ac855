"""The inference loop: test, mine, prove, and mutate the postcondition at fixpoints."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Any, Optional, TextIO

from ..candidates import Candidate, Origin, Status
from ..gindyn import (
    MutantSet,
    Schedule,
    build_pools,
    dynamic_validate,
    eliminate_tautologies,
    extract_predicates,
    load_schedule,
    run_wave,
)
from ..interp import holds_on_states, site_states
from ..lang.ast import Binary, Expr, LoopSite, Program
from ..lang.normalize import formula_key
from ..lang.printer import show, show_program
from ..prover import ProofResult, Solver, SolverConfig, houdini, prove_program
from ..prover.vcgen import tautology_vcs
from ..templates import filter_by_suite, instantiate_templates
from ..testgen import EmptySuite, TestSuite, falsify, generate_valid_inputs

log = logging.getLogger(__name__)

SUCCESS = "Success"
FAILURE = "Failure"
REPORT_SCHEMA = "forge-report/1"
# Report fields that depend on wall-clock time; excluded from determinism checks.
TIMING_FIELDS = ("timings",)
PHASES = ("testgen", "mine", "houdini", "prove")


@dataclass
class RunConfig:
    test_budget: int = 300
    max_iterations: int = 20
    waves_path: Optional[str] = None
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    max_mutants: Optional[int] = None
    batch_size: int = 1000
    report_path: Optional[str] = None
    dump_tests: Optional[str] = None
    provenance_path: Optional[str] = None

    def validate(self) -> None:
        from ..gindyn import ConfigError

        if self.test_budget < 1 or self.max_iterations < 1 or self.batch_size < 1:
            raise ConfigError("budgets must be positive")
        if self.max_mutants is not None and self.max_mutants < 1:
            raise ConfigError("max_mutants must be positive")
        if self.solver.timeout <= 0:
            raise ConfigError("solver timeout must be positive")

    def schedule(self) -> Schedule:
        sched = load_schedule(self.waves_path)
        if self.max_mutants is not None:
            sched = Schedule(sched.waves, self.max_mutants)
        return sched


@dataclass
class WaveStats:
    id: int
    kind: int
    steps: tuple[str, ...]
    raw: int = 0
    generated: int = 0
    aborted: bool = False
    dynamic_survivors: int = 0
    tautologies: int = 0
    added: int = 0

    @property
    def falsified_pct(self) -> float:
        return _pct(self.generated - self.dynamic_survivors, self.generated)

    @property
    def tautology_pct(self) -> float:
        return _pct(self.tautologies, self.dynamic_survivors)

    def to_json(self) -> dict:
        return {
            "id": self.id, "kind": self.kind, "steps": list(self.steps), "raw": self.raw,
            "generated": self.generated, "aborted": self.aborted,
            "dynamic_survivors": self.dynamic_survivors, "tautologies": self.tautologies,
            "added": self.added, "falsified_pct": round(self.falsified_pct, 2),
            "tautology_pct": round(self.tautology_pct, 2),
        }


def _pct(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


@dataclass
class RunReport:
    program: str
    seed: int
    outcome: str = FAILURE
    reason: str = ""
    iterations: int = 0
    proved: dict[int, list[Candidate]] = field(default_factory=dict)
    unproved: dict[int, list[Candidate]] = field(default_factory=dict)
    proof: Optional[ProofResult] = None
    waves: list[WaveStats] = field(default_factory=list)
    template_candidates: int = 0
    phases: list[tuple[int, str]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    suite_size: int = 0
    golden_lost_dynamic: list[str] = field(default_factory=list)
    golden_generated: list[str] = field(default_factory=list)
    golden_match: dict[str, Optional[str]] = field(default_factory=dict)
    tautologies_removed: list[tuple[int, str, list[str]]] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome == SUCCESS

    def proved_formulas(self) -> dict[int, list[Expr]]:
        return {lid: [c.formula for c in cs] for lid, cs in self.proved.items()}

    @property
    def invariant_count(self) -> int:
        return sum(len(cs) for cs in self.proved.values())

    @property
    def gindyn_count(self) -> int:
        return sum(c.origin.kind == "mutation" for cs in self.proved.values() for c in cs)

    @property
    def mutant_candidates(self) -> int:
        return sum(w.generated for w in self.waves)

    @property
    def candidates(self) -> int:
        return self.template_candidates + self.mutant_candidates

    @property
    def falsified_pct(self) -> float:
        gen = self.mutant_candidates
        return _pct(gen - sum(w.dynamic_survivors for w in self.waves), gen)

    @property
    def tautology_pct(self) -> float:
        return _pct(sum(w.tautologies for w in self.waves), sum(w.dynamic_survivors for w in self.waves))

    @property
    def proved_pct(self) -> float:
        return self.proof.program_discharged_pct if self.proof else 0.0

    def to_json(self) -> dict[str, Any]:
        proof = self.proof
        program_obs = proof.program_obligations() if proof else []
        return {
            "schema": REPORT_SCHEMA,
            "program": self.program,
            "seed": self.seed,
            "outcome": self.outcome,
            "reason": self.reason,
            "iterations": self.iterations,
            "proved": {
                str(lid): [{"formula": c.text(), "origin": c.origin.kind, "wave": c.origin.wave}
                           for c in cs]
                for lid, cs in sorted(self.proved.items())
            },
            "unproved": {str(lid): [c.text() for c in cs] for lid, cs in sorted(self.unproved.items())},
            "obligations": {
                "total": proof.total if proof else 0,
                "discharged": proof.discharged if proof else 0,
                "program_total": len(program_obs),
                "program_discharged": sum(v.valid for _, v in program_obs),
                "proved_pct": round(self.proved_pct, 2),
                "failures": [vc.id for vc, _ in proof.failures()] if proof else [],
            },
            "invariants": self.invariant_count,
            "gindyn_invariants": self.gindyn_count,
            "gindyn_share_pct": round(_pct(self.gindyn_count, self.invariant_count), 2),
            "waves_used": len(self.waves),
            "waves": [w.to_json() for w in self.waves],
            "template_candidates": self.template_candidates,
            "candidates": self.candidates,
            "falsified_pct": round(self.falsified_pct, 2),
            "tautology_pct": round(self.tautology_pct, 2),
            "suite_size": self.suite_size,
            "phases": [[i, p] for i, p in self.phases],
            "golden": {k: v for k, v in sorted(self.golden_match.items())},
            "golden_generated": sorted(self.golden_generated),
            "golden_lost_dynamic": sorted(self.golden_lost_dynamic),
            "tautologies_removed": [[lid, text, verified] for lid, text, verified in self.tautologies_removed],
            "timings": {k: round(v, 3) for k, v in sorted(self.timings.items())},
        }


# ---------------------------------------------------------------------------
# Wave generation depends only on the program and the schedule, so the
# generated sets are shared between runs with different seeds.


class WaveGenerator:
    """Lazily runs the schedule for one loop, one wave at a time."""

    def __init__(self, program: Program, site: LoopSite, schedule: Schedule):
        self.program = program
        self.site = site
        self.schedule = schedule
        self.pool = build_pools(program, site, program.post)
        before = list(self.pool.bools)
        extract_predicates(self.pool, program.post)
        self.extracted = [b for b in self.pool.bools if b not in before]
        self.memo: set[str] = set()
        self.results: list = []

    def wave(self, index: int):
        while len(self.results) <= index:
            w = self.schedule.waves[len(self.results)]
            result = self.program.result[1] if self.program.result else None
            self.results.append(run_wave(w, self.program.post, self.pool, self.memo,
                                         self.program.var_types, result, self.extracted,
                                         self.schedule.max_mutants))
        return self.results[index]


_GENERATORS: dict[tuple, dict[int, WaveGenerator]] = {}


def wave_generators(program: Program, schedule: Schedule) -> dict[int, WaveGenerator]:
    key = (show_program(program), schedule)
    gens = _GENERATORS.get(key)
    if gens is None:
        _GENERATORS.clear()  # keep only the most recent program's mutants in memory
        gens = {site.id: WaveGenerator(program, site, schedule) for site in program.loops}
        _GENERATORS[key] = gens
    return gens


# ---------------------------------------------------------------------------


class _Run:
    def __init__(self, program: Program, config: RunConfig):
        config.validate()
        self.program = program
        self.config = config
        self.schedule = config.schedule()
        self.solver = Solver(config.solver)
        self.report = RunReport(program.name, config.seed)
        self.suite: Optional[TestSuite] = None
        self.mined: dict[tuple[int, str], Candidate] = {}
        self.falsified: dict[int, set[str]] = {site.id: set() for site in program.loops}
        self.verified: list[Candidate] = []
        self.unproved: list[Candidate] = []
        self.next_wave = 0
        self.golden = {site.id: {formula_key(g): g for g in site.node.invariants} for site in program.loops}
        self.provenance: Optional[TextIO] = None

    # -- helpers ---------------------------------------------------------
    def _time(self, phase: str, start: float) -> None:
        self.report.timings[phase] = self.report.timings.get(phase, 0.0) + time.perf_counter() - start

    def _phase(self, it: int, name: str) -> None:
        self.report.phases.append((it, name))
        log.info("%s iteration %d: %s", self.program.name, it, name)

    def _surviving_keys(self) -> frozenset:
        return frozenset(self.mined)

    def _memo_falsified(self, c: Candidate) -> None:
        self.falsified[c.loop_id].add(c.key)
        gold = self.golden.get(c.loop_id, {})
        if c.key in gold and c.origin.kind == "mutation":
            self.report.golden_lost_dynamic.append(c.text())

    # -- phases ----------------------------------------------------------
    def testgen(self, it: int) -> TestSuite:
        budget, seed = self.config.test_budget, self.config.seed
        if self.suite is None:
            return generate_valid_inputs(self.program, budget, seed)
        if self.unproved:
            _, fresh = falsify(self.program, self.unproved, budget, f"{seed}:{it}")
        else:
            fresh = generate_valid_inputs(self.program, budget, f"{seed}:{it}")
        return fresh

    def mine(self, new_suite: TestSuite) -> None:
        old_keys = set(t.key for t in self.suite.tests) if self.suite else set()
        self.suite = self.suite.merge(new_suite) if self.suite else new_suite
        new_traces = [t.trace for t in self.suite.tests if t.key not in old_keys]
        # re-check mined candidates against the tests they have not seen
        states = {site.id: site_states(new_traces, site.id) for site in self.program.loops}
        for ident, c in list(self.mined.items()):
            if not holds_on_states(c.formula, states[c.loop_id]):
                c.mark(Status.FALSIFIED)
                self._memo_falsified(c)
                del self.mined[ident]
        # templates over the cumulative suite
        for site in self.program.loops:
            fresh = [c for c in instantiate_templates(site, self.suite, self.program)
                     if c.key not in self.falsified[site.id] and (site.id, c.key) not in self.mined]
            self.report.template_candidates += len(fresh)
            kept = filter_by_suite(fresh, self.suite)
            for c in fresh:
                if c.status == Status.FALSIFIED:
                    self.falsified[site.id].add(c.key)
            for c in kept:
                self.mined[c.ident] = c

    def add_wave(self) -> bool:
        """Run the next wave on every loop; False once the schedule is exhausted."""
        if self.next_wave >= len(self.schedule.waves):
            return False
        index = self.next_wave
        self.next_wave += 1
        w = self.schedule.waves[index]
        stats = WaveStats(w.id, w.kind, w.steps)
        for site_id, gen in sorted(wave_generators(self.program, self.schedule).items()):
            result = gen.wave(index)
            stats.raw += result.raw
            stats.aborted |= result.aborted
            fresh = MutantSet({k: m for k, m in result.mutants.items.items()
                               if k not in self.falsified[site_id] and (site_id, k) not in self.mined})
            stats.generated += len(fresh)
            survivors = dynamic_validate(fresh, self.suite, gen.site, self.config.batch_size)
            alive = {c.key for c in survivors}
            gold = self.golden.get(site_id, {})
            for k in fresh.keys():
                if k in gold:
                    self.report.golden_generated.append(show(gold[k]))
                    if k not in alive:
                        self.report.golden_lost_dynamic.append(show(gold[k]))
            stats.dynamic_survivors += len(survivors)
            verified = [c for c in self.verified if c.loop_id == site_id]
            kept, removed = eliminate_tautologies(self.program, survivors, verified, self.solver)
            stats.tautologies += len(removed)
            for c in removed:
                self.report.tautologies_removed.append((site_id, c.text(), [v.text() for v in verified]))
            for c in kept:
                self.mined[c.ident] = c
            stats.added += len(kept)
            self._log_provenance(w, site_id, result.mutants, alive, {c.key for c in kept})
        self.report.waves.append(stats)
        log.info("%s: %s added %d candidates", self.program.name, w.describe(), stats.added)
        return True

    def _log_provenance(self, w, site_id: int, mutants: MutantSet, alive: set[str], kept: set[str]) -> None:
        if not self.config.provenance_path:
            return
        if self.provenance is None:
            self.provenance = open(self.config.provenance_path, "w")
        for key, m in mutants.items.items():
            fate = "kept" if key in kept else "tautology" if key in alive else "falsified"
            self.provenance.write(f"{self.program.name}\tloop{site_id}\twave{w.id}\t{fate}\t{key}\t"
                                  f"{' <- '.join(m.chain)}\n")

    def run_houdini(self) -> None:
        by_loop: dict[int, list[Candidate]] = {site.id: [] for site in self.program.loops}
        for c in self.mined.values():
            by_loop[c.loop_id].append(c)
        proved, rejected = houdini(self.program, by_loop, self.solver)
        self.verified = [c for lid in sorted(proved) for c in proved[lid]]
        self.unproved = rejected
        self.report.proved = proved
        self.report.unproved = {}
        for c in rejected:
            self.report.unproved.setdefault(c.loop_id, []).append(c)

    # -- main loop -------------------------------------------------------
    def execute(self) -> RunReport:
        report = self.report
        previous: Optional[frozenset] = None
        try:
            for it in range(1, self.config.max_iterations + 1):
                report.iterations = it
                start = time.perf_counter()
                self._phase(it, "testgen")
                try:
                    new_suite = self.testgen(it)
                except EmptySuite as exc:
                    report.reason = f"empty test suite: {exc}"
                    return report
                self._time("testgen", start)

                start = time.perf_counter()
                self._phase(it, "mine")
                self.mine(new_suite)
                current = self._surviving_keys()
                if previous is not None and current == previous:
                    while current == previous:
                        if not self.add_wave():
                            report.reason = "fixpoint with the wave schedule exhausted"
                            self._time("mine", start)
                            self._final_proof()
                            return report
                        current = self._surviving_keys()
                previous = current
                self._time("mine", start)

                start = time.perf_counter()
                self._phase(it, "houdini")
                self.run_houdini()
                self._time("houdini", start)

                start = time.perf_counter()
                self._phase(it, "prove")
                report.proof = prove_program(self.program, report.proved_formulas(), self.solver)
                self._time("prove", start)
                if report.proof.full_proof:
                    report.outcome = SUCCESS
                    report.reason = "full proof"
                    return report
            report.reason = "iteration limit reached"
            return report
        finally:
            if self.suite is not None:
                report.suite_size = len(self.suite)
                if self.config.dump_tests:
                    os.makedirs(self.config.dump_tests, exist_ok=True)
                    path = os.path.join(self.config.dump_tests, f"{self.program.name}-{self.config.seed}.json")
                    with open(path, "w") as fh:
                        fh.write(self.suite.to_json())
            if self.provenance is not None:
                self.provenance.close()
            self._match_golden()

    def _final_proof(self) -> None:
        if self.report.proof is None:
            self.run_houdini()
            self.report.proof = prove_program(self.program, self.report.proved_formulas(), self.solver)

    def _match_golden(self) -> None:
        """For each golden invariant, a proved invariant of the same loop that
        is logically equivalent to it, if any."""
        for site in self.program.loops:
            golden = list(site.node.invariants)
            proved = self.report.proved.get(site.id, [])
            for g in golden:
                self.report.golden_match[f"{site.id}:{show(g)}"] = None
            if not golden or not proved:
                continue
            goals, pairs = [], []
            for g in golden:
                for p in proved:
                    if formula_key(p.formula) == formula_key(g):
                        self.report.golden_match[f"{site.id}:{show(g)}"] = p.text()
            for g in golden:
                if self.report.golden_match[f"{site.id}:{show(g)}"] is not None:
                    continue
                for p in proved:
                    goals.append(Binary("&&", Binary("==>", g, p.formula), Binary("==>", p.formula, g)))
                    pairs.append((g, p))
            if not goals:
                continue
            verdicts = self.solver.check_all(tautology_vcs(self.program, site.id, [], goals))
            for (g, p), v in zip(pairs, verdicts):
                slot = f"{site.id}:{show(g)}"
                if v.valid and self.report.golden_match[slot] is None:
                    self.report.golden_match[slot] = p.text()


def run_dynamate(program: Program, config: Optional[RunConfig] = None) -> RunReport:
    """Infer loop invariants for `program` and try to prove it correct."""
    config = config or RunConfig()
    report = _Run(program, config).execute()
    if config.report_path:
        import json

        with open(config.report_path, "w") as fh:
            json.dump(report.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    return report
