from __future__ import annotations

import json

import pytest

from forge.corpus import corpus_dir, load
from forge.driver import FAILURE, REPORT_SCHEMA, SUCCESS, RunConfig, run_dynamate
from forge.driver.cli import main
from forge.driver.corpus import CORPUS_SCHEMA, format_table, run_corpus, strip_timings
from forge.gindyn import ConfigError
from forge.lang import parse_program, typecheck
from forge.prover import Solver, inductive, prove_program
from forge.prover import solver as solver_mod

LOOP_FREE = "method inc(x: int) ensures x == \\old(x) + 1; { x := x + 1; }\n"
PHASES = ["testgen", "mine", "houdini", "prove"]


def test_loop_free_success_in_first_iteration():
    report = run_dynamate(typecheck(parse_program(LOOP_FREE)), RunConfig(test_budget=20))
    assert report.outcome == SUCCESS and report.iterations == 1 and report.invariant_count == 0


def test_report_schema_and_phase_order():
    report = run_dynamate(load("fill_a"), RunConfig(seed=0))
    data = report.to_json()
    assert data["schema"] == REPORT_SCHEMA
    for k in ("outcome", "iterations", "proved", "obligations", "invariants", "gindyn_share_pct",
              "waves_used", "candidates", "falsified_pct", "tautology_pct", "timings"):
        assert k in data
    phases = data["phases"]
    for it in range(1, data["iterations"] + 1):
        assert [p for i, p in phases if i == it] == PHASES
    json.dumps(data)


def test_success_invariants_reverify_from_scratch():
    p = load("indexOf")
    report = run_dynamate(p, RunConfig(seed=1))
    assert report.success
    solver_mod._CACHE.clear()
    assert inductive(p, report.proved_formulas(), Solver())
    assert prove_program(p, report.proved_formulas(), Solver()).full_proof


def test_failure_is_never_worse_than_no_invariants(tmp_path):
    p = load("sortCopy")
    report = run_dynamate(p, RunConfig(seed=0, max_iterations=3))
    assert report.outcome == FAILURE
    baseline = prove_program(p, {}, Solver()).program_discharged_pct
    assert report.proved_pct >= baseline


def test_deterministic_report():
    p = load("fill_b")
    first = strip_timings(run_dynamate(p, RunConfig(seed=4)).to_json())
    second = strip_timings(run_dynamate(p, RunConfig(seed=4)).to_json())
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_empty_suite_is_a_failure():
    p = typecheck(parse_program("method m(x: int) requires false; { skip; }"))
    report = run_dynamate(p, RunConfig(test_budget=10))
    assert report.outcome == FAILURE and "empty test suite" in report.reason


@pytest.mark.parametrize("kwargs", [{"test_budget": 0}, {"max_iterations": 0}, {"max_mutants": 0},
                                    {"batch_size": 0}])
def test_bad_config(kwargs):
    with pytest.raises(ConfigError):
        run_dynamate(load("fill_a"), RunConfig(**kwargs))


def test_empty_corpus(tmp_path):
    result = run_corpus(tmp_path, seeds=2)
    assert result["schema"] == CORPUS_SCHEMA
    assert result["empty"] and result["row_count"] == 0 and result["rows"] == []
    assert format_table(result) == "(no programs)\n"


def test_broken_program_is_recorded(tmp_path):
    (tmp_path / "bad.mlw").write_text("method bad( {")
    (tmp_path / "inc.mlw").write_text(LOOP_FREE)
    result = run_corpus(tmp_path, RunConfig(test_budget=20), seeds=1)
    rows = {r["program"]: r for r in result["rows"]}
    assert rows["bad"]["errors"] == 1 and rows["inc"]["success_rate"] == 100.0


def test_cli_prove(tmp_path, capsys):
    report = tmp_path / "r.json"
    code = main(["prove", str(corpus_dir() / "fill_a.mlw"), "--seed", "0", "--report", str(report)])
    out = capsys.readouterr().out
    assert code == 0 and "Success" in out and "invariant" in out
    assert json.loads(report.read_text())["outcome"] == SUCCESS


def test_cli_errors(tmp_path, capsys):
    assert main(["prove", str(tmp_path / "missing.mlw")]) == 2
    bad = tmp_path / "bad.mlw"
    bad.write_text("method m(x: int) { x := y; }")
    assert main(["prove", str(bad)]) == 2
    waves = tmp_path / "w.json"
    waves.write_text("{}")
    assert main(["prove", str(corpus_dir() / "fill_a.mlw"), "--waves", str(waves)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_corpus(tmp_path, capsys):
    (tmp_path / "inc.mlw").write_text(LOOP_FREE)
    out_json, out_table = tmp_path / "c.json", tmp_path / "c.txt"
    code = main(["corpus", str(tmp_path), "--seeds", "1", "--budget", "20",
                 "--json", str(out_json), "--table", str(out_table)])
    assert code == 0
    assert json.loads(out_json.read_text())["row_count"] == 1
    assert out_table.read_text().startswith("program")
    assert "inc" in capsys.readouterr().out


def test_cli_dumps(tmp_path):
    tests_dir, vcs_dir, prov = tmp_path / "tests", tmp_path / "vcs", tmp_path / "prov.tsv"
    solver_mod._CACHE.clear()
    main(["prove", str(corpus_dir() / "fill_a.mlw"), "--dump-tests", str(tests_dir),
          "--dump-vcs", str(vcs_dir), "--provenance", str(prov)])
    assert json.loads((tests_dir / "fill_a-0.json").read_text())["tests"]
    assert any(vcs_dir.iterdir())
    assert prov.exists()
