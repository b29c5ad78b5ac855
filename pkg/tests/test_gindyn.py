from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forge.candidates import Candidate, Status
from forge.corpus import load
from forge.driver.run import WaveGenerator
from forge.gindyn import (
    ConfigError,
    MutantSet,
    Wave,
    aging_raw,
    apply_aging,
    apply_substitution,
    apply_weakening,
    build_pools,
    dynamic_validate,
    eliminate_tautologies,
    extract_predicates,
    load_schedule,
    parse_schedule,
    run_wave,
    substitution_raw,
    weakening_raw,
)
from forge.interp import run
from forge.lang import LIBRARY, formula_key, parse_formula, parse_program, show, typecheck
from forge.lang.ast import Type, Var
from forge.prover import Solver
from forge.testgen import TestCase, TestSuite, generate_valid_inputs

from gen import VAR_TYPES, bool_expr, int_expr, int_occurrences

PREDS = set(LIBRARY)
USELESS = "low < 0 ==> !has(a, fromIndex, mid, key)"


def f(text: str):
    return parse_formula(text, PREDS)


def key(text: str) -> str:
    return formula_key(f(text))


@pytest.fixture(scope="module")
def bs():
    return load("binarySearch0")


@pytest.fixture(scope="module")
def bs_waves(bs):
    return WaveGenerator(bs, bs.loops[0], load_schedule())


# -- operators ---------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_operator_counts_match_enumeration(seed):
    rng = random.Random(seed)
    m = bool_expr(rng, 3, result=True)
    pool = [int_expr(rng, 1) for _ in range(rng.randint(0, 5))]
    bools = [bool_expr(rng, 1) for _ in range(rng.randint(0, 4))]
    s = int_occurrences(m, True)
    assert len(list(substitution_raw(m, pool, VAR_TYPES, Type.INT))) == s * len(pool)
    assert len(list(aging_raw(m, VAR_TYPES, Type.INT))) == 2 * s
    assert len(list(weakening_raw(m, bools))) == 2 * len(bools)


def test_aging_reaches_shifted_has(bs):
    out = apply_aging(f("!has(a, high, toIndex, key)"), bs.var_types)
    assert key("!has(a, high + 1, toIndex, key)") in out.keys()


def test_aging_equality_gives_four():
    out = apply_aging(f("x == y"), {"x": Type.INT, "y": Type.INT})
    assert sorted(show(m) for m in out.formulas()) == sorted(
        ["x + 1 == y", "x - 1 == y", "x == y + 1", "x == y - 1"])


def test_operators_on_formula_without_ints():
    assert len(apply_aging(f("b"), {"b": Type.BOOL})) == 0
    assert len(apply_substitution(f("true"), Var("x"), {"x": Type.INT})) == 0


def test_self_substitution():
    out = apply_substitution(f("x > 0"), Var("x"), {"x": Type.INT})
    assert set(out.keys()) == {key("x > 0"), key("x > x")}


def test_weakening_pair():
    out = apply_weakening(f("sorted(a, 0, i)"), f("i < a.length"))
    assert sorted(show(m) for m in out.formulas()) == sorted(
        ["i < a.length ==> sorted(a, 0, i)", "!(i < a.length) ==> sorted(a, 0, i)"])
    assert key("x > 0") in apply_weakening(f("x > 0"), f("true")).keys()


def test_two_substitutions_give_useless_mutant(bs):
    step1 = apply_substitution(bs.post[1], Var("low"), bs.var_types, Type.INT)
    mids = MutantSet()
    for m in step1:
        for g in apply_substitution(m.formula, Var("mid"), bs.var_types, Type.INT).formulas():
            mids.add(g, None, ())
    assert key(USELESS) in mids.keys()


# -- pools -------------------------------------------------------------------


def test_binary_search_pool(bs):
    pool = build_pools(bs, bs.loops[0], bs.post)
    ints = {show(e) for e in pool.ints}
    assert {"low", "high", "mid", "fromIndex", "toIndex", "key", "0", "1", "-1", "a.length",
            "\\old(fromIndex)"} <= ints
    assert pool.collections == {"TArrays"}
    assert pool.bools == []


def test_extraction(bs):
    pool = extract_predicates(build_pools(bs, bs.loops[0], bs.post), bs.post)
    assert key("!has(a, fromIndex, toIndex, key)") in {formula_key(b) for b in pool.bools}
    assert {b.operand.name if hasattr(b, "operand") else b.name
            for b in pool.bools if "(" in show(b)} >= {"within", "sorted", "has"}


def test_extraction_without_predicates():
    p = typecheck(parse_program(
        "method m(n: int) ensures n >= 0; { var i: int; i := 0; while (i < n) { i := i + 1; } }"))
    pool = extract_predicates(build_pools(p, p.loops[0], p.post), p.post)
    assert pool.arrays == []
    assert all("(" not in show(b) for b in pool.bools)


def test_sorted_brings_whole_collection():
    p = typecheck(parse_program(
        "method m(a: int[]) requires a != null; ensures sorted(a, 0, a.length);"
        " { var i: int; i := 0; while (i < a.length) { i := i + 1; } }"))
    pool = extract_predicates(build_pools(p, p.loops[0], p.post), p.post)
    names = {show(b).lstrip("!").split("(")[0] for b in pool.bools}
    assert {"within", "sorted", "has"} <= names


# -- waves -------------------------------------------------------------------


def test_schedule_shape():
    sched = load_schedule()
    assert len(sched.waves) == 16
    kinds = [w.kind for w in sched.waves]
    assert (kinds.count(1), kinds.count(2), kinds.count(3)) == (7, 4, 5)
    assert all(len(w.steps) <= 3 for w in sched.waves)
    assert sched.max_mutants == 200_000


@pytest.mark.parametrize("bad", [
    {"waves": [{"id": 1, "kind": 4, "steps": []}]},
    {"waves": [{"id": 1, "kind": 1, "steps": ["sub", "sub", "sub", "sub"]}]},
    {"waves": [{"id": 1, "kind": 1, "steps": ["swap"]}]},
    {"waves": [{"id": 1, "kind": 1}, {"id": 1, "kind": 2}]},
    {"nothing": []},
])
def test_bad_schedules(bad):
    with pytest.raises(ConfigError):
        parse_schedule(bad)


def test_schedule_file_round_trip(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"version": 1, "max_mutants": 10,
                                "waves": [{"id": 5, "kind": 2, "steps": ["sub"], "parameterless": True}]}))
    sched = load_schedule(str(path))
    assert sched.max_mutants == 10 and sched.waves[0] == Wave(5, 2, ("sub",), True)


def test_clause_wave_contains_useless_mutant(bs, bs_waves):
    index = [w.id for w in bs_waves.schedule.waves].index(7)
    assert key(USELESS) in bs_waves.wave(index).mutants.keys()


def test_collection_waves_contain_has_invariants(bs, bs_waves):
    # a fresh memo, since earlier predicate waves already emit the first one
    found = set()
    for w in bs_waves.schedule.waves[:6]:
        if w.kind == 3:
            out = run_wave(w, bs.post, bs_waves.pool, set(), bs.var_types, Type.INT, bs_waves.extracted)
            found |= set(out.mutants.keys())
    assert key("!has(a, fromIndex, low, key)") in found
    assert key("!has(a, high + 1, toIndex, key)") in found


def test_identity_wave_returns_seeds():
    p = load("fill_b")
    pool = build_pools(p, p.loops[0], p.post)
    out = run_wave(Wave(99, 1, ()), p.post, pool, set(), p.var_types)
    assert set(out.mutants.keys()) == {formula_key(c) for c in p.post}


def test_result_mutants_dropped_and_memo_applies(bs):
    pool = build_pools(bs, bs.loops[0], bs.post)
    memo: set[str] = set()
    out = run_wave(Wave(1, 1, ()), bs.post, pool, memo, bs.var_types, Type.INT)
    assert len(out.mutants) == 0 and out.dropped_result == 2
    first = run_wave(Wave(2, 1, ("sub",)), bs.post, pool, memo, bs.var_types, Type.INT)
    again = run_wave(Wave(3, 1, ("sub",)), bs.post, pool, memo, bs.var_types, Type.INT)
    assert len(first.mutants) > 0 and len(again.mutants) == 0
    assert again.dropped_memo == len(first.mutants)


def test_mutant_cap_keeps_partial_set():
    p = load("fill_b")
    pool = build_pools(p, p.loops[0], p.post)
    out = run_wave(Wave(1, 1, ("sub", "sub")), p.post, pool, set(), p.var_types, None, cap=50)
    assert out.aborted and out.raw == 51
    assert len(out.mutants) > 0


# -- dynamic validation and tautologies ---------------------------------------


def _suite(program, inputs_list) -> TestSuite:
    suite = TestSuite()
    for inputs in inputs_list:
        suite.add(TestCase(inputs, run(program, inputs)))
    return suite


def test_dynamic_validation_examples(bs):
    ms = MutantSet()
    ms.add(f(USELESS), 7, ())
    ms.add(f("!has(a, high, toIndex, key)"), 3, ())
    suite = _suite(bs, [{"a": (0, 1, 2), "fromIndex": 0, "toIndex": 3, "key": 2},
                        {"a": (0,) * 8, "fromIndex": 0, "toIndex": 6, "key": -1030}])
    survivors = dynamic_validate(ms, suite, bs.loops[0])
    assert [c.text() for c in survivors] == [USELESS]
    assert survivors[0].status is Status.SURVIVING and survivors[0].origin.wave == 7
    assert dynamic_validate(MutantSet(), suite, bs.loops[0]) == []


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_partition_independence(bs, bs_waves, seed):
    suite = generate_valid_inputs(bs, 60, seed)
    muts = bs_waves.wave(0).mutants
    one = dynamic_validate(muts, suite, bs.loops[0], batch_size=1)
    full = dynamic_validate(muts, suite, bs.loops[0], batch_size=max(1, len(muts)))
    assert [c.key for c in one] == [c.key for c in full]


def _proved(texts):
    out = []
    for t in texts:
        c = Candidate(0, f(t))
        c.mark(Status.SURVIVING)
        c.mark(Status.PROVED)
        out.append(c)
    return out


def test_tautology_examples(bs):
    solver = Solver()
    survivors = [Candidate(0, f(t)) for t in ("low <= low", USELESS, "!has(a, fromIndex, low, key)")]
    verified = _proved(["fromIndex <= low", "0 <= fromIndex", "low <= high + 1", "high < toIndex"])
    kept, removed = eliminate_tautologies(bs, survivors, verified, solver)
    assert [c.text() for c in removed] == ["low <= low", USELESS]
    assert [c.text() for c in kept] == ["!has(a, fromIndex, low, key)"]


def test_useless_mutant_kept_without_bounds(bs):
    kept, removed = eliminate_tautologies(bs, [Candidate(0, f(USELESS))], [], Solver())
    assert removed == [] and len(kept) == 1
