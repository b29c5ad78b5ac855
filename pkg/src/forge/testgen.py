"""Feedback-directed random generation of precondition-satisfying inputs.

Inputs are drawn from type-driven value pools. Inputs that reach a branch no
earlier input reached join a population that later samples mutate, which
steers generation toward the uncovered parts of the program. All randomness
comes from one seeded generator, and the budget counts generated inputs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .candidates import Candidate
from .interp import DEFAULT_STEP_LIMIT, Trace, run, violation
from .interp.evaluator import DefinednessError, eval_expr
from .lang.ast import Call, If, Program, Type, Var, While, walk_stmts

SUITE_CAP = 5000
MAX_LEN = 8


class EmptySuite(Exception):
    pass


def input_key(inputs: dict[str, Any]) -> tuple:
    return tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in inputs.items()))


@dataclass
class TestCase:
    __test__ = False  # not a pytest class

    inputs: dict[str, Any]
    trace: Trace

    @property
    def key(self) -> tuple:
        return input_key(self.inputs)


@dataclass
class TestSuite:
    __test__ = False

    tests: list[TestCase] = field(default_factory=list)
    covered: set[str] = field(default_factory=set)
    seed: Any = 0
    budget_spent: int = 0
    _keys: set = field(default_factory=set, repr=False)

    def __len__(self) -> int:
        return len(self.tests)

    def add(self, test: TestCase) -> bool:
        if not test.trace.outcome.normal or test.key in self._keys:
            return False
        self._keys.add(test.key)
        self.tests.append(test)
        self.covered |= test.trace.branches
        return True

    def traces(self) -> list[Trace]:
        return [t.trace for t in self.tests]

    def merge(self, other: "TestSuite", cap: int = SUITE_CAP) -> "TestSuite":
        """Union keyed on input; beyond `cap`, keep branch-diverse tests first."""
        out = TestSuite(seed=self.seed, budget_spent=self.budget_spent + other.budget_spent)
        for t in list(self.tests) + list(other.tests):
            out.add(t)
        if len(out.tests) > cap:
            out = _retain(out, cap)
        out.covered |= self.covered | other.covered
        return out

    def to_json(self) -> str:
        rows = [
            {
                "inputs": {k: (list(v) if isinstance(v, (list, tuple)) else v)
                           for k, v in sorted(t.inputs.items())},
                "outcome": t.trace.outcome.kind.value,
                "result": t.trace.outcome.result if not isinstance(t.trace.outcome.result, tuple)
                else list(t.trace.outcome.result),
                "branches": sorted(t.trace.branches),
            }
            for t in self.tests
        ]
        return json.dumps({"seed": str(self.seed), "covered": sorted(self.covered), "tests": rows},
                          indent=1, sort_keys=True)


def _retain(suite: TestSuite, cap: int) -> TestSuite:
    chosen: list[int] = []
    seen: set[str] = set()
    for i, t in enumerate(suite.tests):
        if not t.trace.branches <= seen:
            chosen.append(i)
            seen |= t.trace.branches
    picked = set(chosen)
    for i in range(len(suite.tests)):
        if len(picked) >= cap:
            break
        picked.add(i)
    out = TestSuite(seed=suite.seed, budget_spent=suite.budget_spent)
    for i in sorted(picked)[:cap]:
        out.add(suite.tests[i])
    return out


def branch_universe(program: Program) -> set[str]:
    out = set()
    for i in range(len(program.pre)):
        out |= {f"pre{i}:T", f"pre{i}:F"}
    for s in walk_stmts(program.body):
        if isinstance(s, If):
            out |= {f"if{s.branch_id}:T", f"if{s.branch_id}:F"}
        elif isinstance(s, While):
            out |= {f"loop{s.site}:enter", f"loop{s.site}:skip", f"loop{s.site}:repeat"}
    return out


class Sampler:
    """Type-driven input sampler for one program."""

    def __init__(self, program: Program, rng: random.Random):
        self.program = program
        self.rng = rng
        lits = program.literals()
        base = set(range(-2, 3)) | lits | {v + 1 for v in lits} | {v - 1 for v in lits}
        self.base_pool = sorted(base)
        self.sorted_slices = [
            c for c in program.pre
            if isinstance(c, Call) and c.name == "sorted" and isinstance(c.args[0], Var)
        ]

    def element(self) -> int:
        if self.rng.random() < 0.1:
            return self.rng.randint(-10, 10)
        return self.rng.choice(self.base_pool)

    def array(self, earlier: list[list[int]]) -> Optional[list[int]]:
        r = self.rng.random()
        if r < 0.05:
            return None
        if earlier and r < 0.35:
            arr = list(self.rng.choice(earlier))
            if arr and self.rng.random() < 0.5:
                arr[self.rng.randrange(len(arr))] = self.element()
            return arr
        return [self.element() for _ in range(self.rng.randint(0, MAX_LEN))]

    def int_pool(self, inputs: dict[str, Any]) -> list[int]:
        pool = set(self.base_pool)
        for v in inputs.values():
            if isinstance(v, list):
                pool |= {len(v), len(v) - 1}
                pool |= set(v)
        return sorted(pool)

    def scalar(self, t: Type, pool: list[int]) -> Any:
        if t == Type.BOOL:
            return self.rng.random() < 0.5
        if self.rng.random() < 0.1:
            return self.rng.randint(-10, 10)
        return self.rng.choice(pool)

    def sample(self) -> dict[str, Any]:
        inputs: dict[str, Any] = {}
        arrays: list[list[int]] = []
        for name, t in self.program.params:
            if t == Type.ARRAY:
                arr = self.array(arrays)
                inputs[name] = arr
                if arr is not None:
                    arrays.append(arr)
        pool = self.int_pool(inputs)
        for name, t in self.program.params:
            if t != Type.ARRAY:
                inputs[name] = self.scalar(t, pool)
        return self.fix_sorted({n: inputs[n] for n, _ in self.program.params})

    def mutate(self, parent: dict[str, Any]) -> dict[str, Any]:
        child = {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in parent.items()}
        name, t = self.rng.choice(self.program.params)
        v = child[name]
        if t == Type.ARRAY:
            op = self.rng.random()
            if v is None or op < 0.05:
                child[name] = self.array([])
            elif op < 0.45 and v:
                v[self.rng.randrange(len(v))] = self.element()
            elif op < 0.7 and len(v) < MAX_LEN:
                v.insert(self.rng.randint(0, len(v)), self.element())
            elif v:
                del v[self.rng.randrange(len(v))]
        elif t == Type.BOOL:
            child[name] = not v
        else:
            if self.rng.random() < 0.5:
                child[name] = v + self.rng.choice((-2, -1, 1, 2))
            else:
                child[name] = self.scalar(t, self.int_pool(child))
        return self.fix_sorted(child)

    def fix_sorted(self, inputs: dict[str, Any]) -> dict[str, Any]:
        """Sort the slices named by `sorted(a, lo, hi)` precondition clauses."""
        for clause in self.sorted_slices:
            arr = inputs.get(clause.args[0].name)
            if arr is None or self.rng.random() < 0.05:  # rarely leave it unsorted
                continue
            try:
                lo = eval_expr(clause.args[1], inputs)
                hi = eval_expr(clause.args[2], inputs)
            except (DefinednessError, KeyError):
                continue
            if 0 <= lo <= hi <= len(arr):
                arr[lo:hi] = sorted(arr[lo:hi])
        return inputs


@dataclass
class FalsificationTarget:
    candidate: Candidate
    hit: bool = False
    witness: Optional[dict[str, Any]] = None


def _search(program: Program, budget: int, seed: Any, targets: Sequence[FalsificationTarget] = (),
            step_limit: int = DEFAULT_STEP_LIMIT) -> TestSuite:
    rng = random.Random(f"testgen:{seed}")
    sampler = Sampler(program, rng)
    suite = TestSuite(seed=seed)
    seen_branches: set[str] = set()
    population: list[tuple[dict[str, Any], int]] = []
    open_targets = [t for t in targets if not t.hit]
    for _ in range(budget):
        suite.budget_spent += 1
        if population and rng.random() < 0.6:
            weights = [w for _, w in population]
            parent = rng.choices(population, weights=weights)[0][0]
            inputs = sampler.mutate(parent)
        else:
            inputs = sampler.sample()
        trace = run(program, inputs, step_limit)
        gained = len(trace.branches - seen_branches)
        seen_branches |= trace.branches
        suite.covered |= trace.branches
        if trace.outcome.normal:
            if suite.add(TestCase(_frozen_inputs(inputs), trace)):
                gained += 1  # valid inputs are good parents even without new branches
            for t in open_targets:
                if not t.hit and violation(t.candidate.formula, t.candidate.loop_id, trace):
                    t.hit = True
                    t.witness = _frozen_inputs(inputs)
                    gained += 1
            open_targets = [t for t in open_targets if not t.hit]
        if gained:
            population.append((inputs, 1 + gained))
    return suite


def _frozen_inputs(inputs: dict[str, Any]) -> dict[str, Any]:
    return {k: (tuple(v) if isinstance(v, list) else v) for k, v in inputs.items()}


def generate_valid_inputs(program: Program, budget: int, seed: Any = 0,
                          step_limit: int = DEFAULT_STEP_LIMIT) -> TestSuite:
    if budget < 1:
        raise ValueError("budget must be positive")
    suite = _search(program, budget, seed, (), step_limit)
    if not suite.tests:
        raise EmptySuite(f"no input satisfying the precondition of {program.name} in {budget} tries")
    return suite


def falsify(program: Program, targets: Iterable[Candidate], budget: int, seed: Any = 0,
            step_limit: int = DEFAULT_STEP_LIMIT) -> tuple[list[FalsificationTarget], TestSuite]:
    records = [FalsificationTarget(c) for c in targets]
    if not records:
        raise ValueError("falsify needs at least one target")
    suite = _search(program, budget, f"falsify:{seed}", records, step_limit)
    return records, suite
