from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from forge.candidates import Candidate
from forge.corpus import corpus_names, load
from forge.interp import (
    DefinednessError,
    Env,
    OutcomeKind,
    Probe,
    check_candidates_on_trace,
    eval_formula,
    run,
    survives_all,
)
from forge.lang import LIBRARY, parse_formula, parse_program, typecheck
from forge.testgen import EmptySuite, generate_valid_inputs

PREDS = set(LIBRARY)


def f(text: str):
    return parse_formula(text, PREDS)


def test_binary_search_not_found_on_zero_prefix():
    p = load("binarySearch0")
    t = run(p, {"a": [0] * 8, "fromIndex": 0, "toIndex": 6, "key": -1030})
    assert t.outcome.kind is OutcomeKind.NORMAL
    assert t.outcome.result < 0
    assert "if1:T" in t.branches  # the final `r < 0` adjustment ran


def test_precondition_violation_has_no_events():
    p = load("binarySearch0")
    t = run(p, {"a": None, "fromIndex": 0, "toIndex": 0, "key": 0})
    assert t.outcome.kind is OutcomeKind.PRE_VIOLATED
    assert t.events == ()


def test_fill_a_three_cells():
    p = load("fill_a")
    t = run(p, {"a": [4, 5, 6], "val": 9})
    assert sum(ev.kind is Probe.AT_ENTRY for ev in t.events) == 3
    assert list(t.final.vars["a"]) == [9, 9, 9]


def test_runtime_error_and_step_limit():
    p = typecheck(parse_program("method m(a: int[], n: int) { var i: int; i := a[n]; }"))
    assert run(p, {"a": [1], "n": 3}).outcome.kind is OutcomeKind.RUNTIME_ERROR
    q = typecheck(parse_program("method m(n: int) { while (n == n) { n := n + 1; } }"))
    assert run(q, {"n": 0}, step_limit=1000).outcome.kind is OutcomeKind.STEP_LIMIT


def test_division_truncates_and_zero_divisor_is_an_error():
    assert eval_formula(f("-7 / 2 == -3 && -7 % 2 == -1"), Env({}))
    p = typecheck(parse_program("method m(x: int) { var y: int; y := 1 / x; }"))
    assert run(p, {"x": 0}).outcome.kind is OutcomeKind.RUNTIME_ERROR


def test_predicate_examples():
    assert eval_formula(f("has(a, 0, 3, 5)"), Env({"a": (1, 5, 9)}))
    assert not eval_formula(f("sorted(a, 0, 2)"), Env({"a": (3, 1)}))
    assert not eval_formula(f("within(a, 0, 0)"), Env({"a": None}))


def test_undefined_access_raises():
    try:
        eval_formula(f("a[3] == 0"), Env({"a": (1,)}))
    except DefinednessError:
        pass
    else:
        raise AssertionError("expected a definedness error")


def test_snapshots_are_isolated_from_later_stores():
    p = load("fill_a")
    t = run(p, {"a": [1, 2], "val": 0})
    first = [ev for ev in t.events if ev.kind is Probe.AT_ENTRY][0]
    assert first.vars["a"] == (1, 2)


def test_candidate_checks_are_independent():
    p = load("binarySearch0")
    t = run(p, {"a": [0, 1, 2], "fromIndex": 0, "toIndex": 3, "key": 2})
    cands = [Candidate(0, f("key == -1030 || key == 0")), Candidate(0, f("true")),
             Candidate(0, f("low <= high + 1")), Candidate(0, f("a[low + 5] == 0"))]
    verdicts = check_candidates_on_trace(cands, t)
    assert [v.survives for v in verdicts] == [False, True, True, False]


def test_bound_relation_survives_zero_array_search():
    p = load("binarySearch0")
    t = run(p, {"a": [0] * 8, "fromIndex": 0, "toIndex": 6, "key": -1030})
    assert check_candidates_on_trace([Candidate(0, f("low <= high + 1"))], t)[0].survives


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_determinism_and_probe_pairing(seed):
    rng = random.Random(seed)
    p = load(rng.choice(corpus_names()))
    try:
        suite = generate_valid_inputs(p, 40, seed)
    except EmptySuite:  # tight preconditions can exhaust a small budget
        return
    for test in suite.tests:
        again = run(p, dict(test.inputs))
        assert again == test.trace
        for site in p.loops:
            before = sum(ev.loop_id == site.id and ev.kind is Probe.BEFORE_ENTRY for ev in again.events)
            after = sum(ev.loop_id == site.id and ev.kind is Probe.AFTER_EXIT for ev in again.events)
            assert before == after


def test_golden_invariants_hold_on_generated_traces():
    for name in corpus_names():
        p = load(name)
        suite = generate_valid_inputs(p, 150, 7)
        for site in p.loops:
            for g in site.node.invariants:
                assert survives_all(g, site.id, suite.traces()), (name, g)
