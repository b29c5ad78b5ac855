from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forge.candidates import Candidate
from forge.corpus import load
from forge.interp import run, violation
from forge.lang import LIBRARY, parse_formula, parse_program, typecheck
from forge.templates import instantiate_templates
from forge.testgen import EmptySuite, falsify, generate_valid_inputs

PREDS = set(LIBRARY)


def f(text: str):
    return parse_formula(text, PREDS)


def test_binary_search_covers_found_and_not_found():
    p = load("binarySearch0")
    both = 0
    for seed in range(30):
        suite = generate_valid_inputs(p, 500, seed)
        outcomes = {t.trace.outcome.result >= 0 for t in suite.tests}
        both += outcomes == {True, False}
    assert both >= 27


def test_unsatisfiable_precondition_gives_empty_suite():
    p = typecheck(parse_program("method m(x: int) requires false; { skip; }"))
    with pytest.raises(EmptySuite):
        generate_valid_inputs(p, 50, 0)


def test_fill_a_small_budget():
    assert len(generate_valid_inputs(load("fill_a"), 10, 0)) >= 1


def test_suite_contents_are_normal_and_unique():
    suite = generate_valid_inputs(load("removeRange"), 300, 3)
    assert all(t.trace.outcome.normal for t in suite.tests)
    assert len({t.key for t in suite.tests}) == len(suite.tests)
    assert suite.budget_spent == 300


def test_reproducible():
    p = load("vecswap")
    assert generate_valid_inputs(p, 200, 5).to_json() == generate_valid_inputs(p, 200, 5).to_json()
    assert generate_valid_inputs(p, 200, 5).to_json() != generate_valid_inputs(p, 200, 6).to_json()


def test_falsify_invalid_has_candidate():
    p = load("binarySearch0")
    records, suite = falsify(p, [Candidate(0, f("!has(a, high, toIndex, key)"))], 300, 0)
    assert records[0].hit
    assert violation(records[0].candidate.formula, 0, run(p, dict(records[0].witness)))
    assert all(t.trace.outcome.normal for t in suite.tests)


@pytest.mark.parametrize("seed", range(3))
def test_falsify_never_hits_valid_invariant(seed):
    p = load("binarySearch0")
    records, _ = falsify(p, [Candidate(0, f("fromIndex <= low"))], 400, seed)
    assert not records[0].hit


def test_falsify_false_hits_immediately():
    p = load("fill_a")
    records, _ = falsify(p, [Candidate(0, f("false"))], 50, 0)
    assert records[0].hit


def test_falsify_needs_targets():
    with pytest.raises(ValueError):
        falsify(load("fill_a"), [], 10, 0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_every_hit_replays_as_violation(seed):
    p = load("indexOf")
    base = generate_valid_inputs(p, 30, seed)
    targets = instantiate_templates(p.loops[0], base, p)[:40]
    records, _ = falsify(p, targets, 100, seed)
    for r in records:
        if r.hit:
            assert violation(r.candidate.formula, r.candidate.loop_id, run(p, dict(r.witness)))


def test_coverage_grows_monotonically_across_merges():
    p = load("binarySearch0")
    suite = generate_valid_inputs(p, 50, 0)
    covered = set(suite.covered)
    for k in range(1, 5):
        suite = suite.merge(generate_valid_inputs(p, 50, k))
        assert covered <= suite.covered
        covered = set(suite.covered)
