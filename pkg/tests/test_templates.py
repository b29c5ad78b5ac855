from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from forge.candidates import TEMPLATE, Candidate, Status
from forge.corpus import load
from forge.interp import run
from forge.lang import LIBRARY, formula_key, parse_formula, parse_program, show, typecheck
from forge.lang.ast import Var
from forge.templates import filter_by_suite, instantiate_templates, pair_templates
from forge.testgen import TestCase, TestSuite, generate_valid_inputs

PREDS = set(LIBRARY)


def f(text: str):
    return parse_formula(text, PREDS)


def suite_of(program, inputs_list) -> TestSuite:
    suite = TestSuite()
    for inputs in inputs_list:
        suite.add(TestCase(inputs, run(program, inputs)))
    return suite


def test_observed_value_set_template():
    p = load("binarySearch0")
    suite = suite_of(p, [
        {"a": (0,) * 8, "fromIndex": 0, "toIndex": 6, "key": -1030},
        {"a": (0, 0, 0), "fromIndex": 0, "toIndex": 3, "key": 0},
    ])
    texts = {c.text() for c in instantiate_templates(p.loops[0], suite, p)}
    assert "key == -1030 || key == 0" in texts


def test_no_int_variables_gives_array_templates_only():
    p = typecheck(parse_program(
        "method m(a: int[]) requires a != null && a.length > 0;"
        " { while (a[0] > 0) { a[0] := a[0] - 1; } }"))
    suite = suite_of(p, [{"a": (2, 1)}])
    assert sorted(c.text() for c in instantiate_templates(p.loops[0], suite, p)) == ["a != null", "a == null"]


def test_pair_relations_collapse_to_six():
    low, high = Var("low"), Var("high")
    relational = pair_templates(low, high)[:6] + pair_templates(high, low)[:6]
    assert len({formula_key(e) for e in relational}) == 6


def test_instantiation_deduplicates_and_is_deterministic():
    p = load("binarySearch0")
    suite = generate_valid_inputs(p, 100, 0)
    first = instantiate_templates(p.loops[0], suite, p)
    second = instantiate_templates(p.loops[0], suite, p)
    assert [c.key for c in first] == [c.key for c in second]
    assert len({c.key for c in first}) == len(first)
    scope = set(p.loops[0].in_scope)
    from forge.lang.ast import free_vars

    assert all(free_vars(c.formula) <= scope for c in first)


def test_filter_examples():
    p = load("binarySearch0")
    suite = generate_valid_inputs(p, 300, 0)
    cands = [Candidate(0, f(t)) for t in ("low >= fromIndex", "false", "a != null")]
    kept = filter_by_suite(cands, suite)
    assert [c.text() for c in kept] == ["low >= fromIndex", "a != null"]
    assert cands[1].status is Status.FALSIFIED
    assert all(c.status is Status.SURVIVING for c in kept)


def test_bound_shapes_survive_initial_suite():
    p = load("binarySearch0")
    suite = generate_valid_inputs(p, 300, 1)
    kept = {c.key for c in filter_by_suite(instantiate_templates(p.loops[0], suite, p), suite)}
    for text in ("a != null", "low >= fromIndex", "high < toIndex", "high <= a.length - 1"):
        assert formula_key(f(text)) in kept, text


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_more_tests_never_grow_survivors(seed):
    p = load("indexOf")
    small = generate_valid_inputs(p, 30, seed)
    big = small.merge(generate_valid_inputs(p, 60, seed + 1))
    forms = [c.formula for c in instantiate_templates(p.loops[0], small, p)]
    on_small = filter_by_suite([Candidate(0, e, TEMPLATE) for e in forms], small)
    on_big = filter_by_suite([Candidate(0, e, TEMPLATE) for e in forms], big)
    assert {c.key for c in on_big} <= {c.key for c in on_small}
    # no false negatives: the survivors re-check on the whole suite
    again = filter_by_suite([Candidate(0, c.formula) for c in on_big], big)
    assert [show(c.formula) for c in again] == [show(c.formula) for c in on_big]
