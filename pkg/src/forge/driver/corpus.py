"""Batch runs over a directory of programs, with aggregate statistics."""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from statistics import mean
from typing import Any, Optional, Sequence

from ..corpus import load_file, program_files
from .run import SUCCESS, TIMING_FIELDS, RunConfig, run_dynamate

log = logging.getLogger(__name__)

CORPUS_SCHEMA = "forge-corpus/1"

# (header, json key, format) for the text table.
COLUMNS = (
    ("program", "program", "{}"),
    ("runs", "runs_count", "{}"),
    ("success %", "success_rate", "{:.0f}"),
    ("proved %", "proved_pct", "{:.1f}"),
    ("iter", "iterations", "{:.1f}"),
    ("inv", "invariants", "{:.1f}"),
    ("gin-dyn %", "gindyn_share_pct", "{:.0f}"),
    ("waves", "waves", "{:.1f}"),
    ("candidates", "candidates", "{:.0f}"),
    ("falsified %", "falsified_pct", "{:.1f}"),
    ("tautology %", "tautology_pct", "{:.1f}"),
)


def strip_timings(report: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in report.items() if k not in TIMING_FIELDS}


def _row(name: str, runs: list[dict[str, Any]]) -> dict[str, Any]:
    ok = [r for r in runs if "error" not in r]
    row: dict[str, Any] = {"program": name, "runs_count": len(runs), "errors": len(runs) - len(ok)}
    if not ok:
        row.update({key: 0.0 for _, key, _ in COLUMNS[2:]})
        return row
    inv = sum(r["invariants"] for r in ok)
    row.update({
        "success_rate": 100.0 * sum(r["outcome"] == SUCCESS for r in ok) / len(runs),
        "proved_pct": mean(r["obligations"]["proved_pct"] for r in ok),
        "iterations": mean(r["iterations"] for r in ok),
        "invariants": mean(r["invariants"] for r in ok),
        "gindyn_share_pct": 100.0 * sum(r["gindyn_invariants"] for r in ok) / inv if inv else 0.0,
        "waves": mean(r["waves_used"] for r in ok),
        "candidates": mean(r["candidates"] for r in ok),
        "falsified_pct": mean(r["falsified_pct"] for r in ok),
        "tautology_pct": mean(r["tautology_pct"] for r in ok),
    })
    return {k: (round(v, 2) if isinstance(v, float) else v) for k, v in row.items()}


def run_corpus(corpus_dir, config: Optional[RunConfig] = None, seeds: int = 10,
               programs: Optional[Sequence[str]] = None, json_path: Optional[str] = None,
               table_path: Optional[str] = None) -> dict[str, Any]:
    """Run every program of `corpus_dir` under seeds config.seed .. config.seed + seeds - 1."""
    config = config or RunConfig()
    files = program_files(corpus_dir)
    if programs is not None:
        files = [f for f in files if f.stem in programs]
    rows: list[dict[str, Any]] = []
    runs_by_program: dict[str, list[dict[str, Any]]] = {}
    for path in files:
        runs: list[dict[str, Any]] = []
        try:
            program = load_file(path)
        except Exception as exc:  # a broken file is recorded, never fatal
            log.error("%s: %s", path.name, exc)
            runs = [{"seed": config.seed + k, "error": f"{type(exc).__name__}: {exc}"} for k in range(seeds)]
        else:
            for k in range(seeds):
                cfg = dataclasses.replace(config, seed=config.seed + k, report_path=None)
                try:
                    runs.append(strip_timings(run_dynamate(program, cfg).to_json()))
                except Exception as exc:
                    log.error("%s seed %d: %s", path.stem, cfg.seed, exc)
                    runs.append({"seed": cfg.seed, "error": f"{type(exc).__name__}: {exc}"})
        name = path.stem
        runs_by_program[name] = runs
        rows.append(_row(name, runs))
    result = {
        "schema": CORPUS_SCHEMA,
        "corpus": Path(corpus_dir).name,
        "seeds": [config.seed + k for k in range(seeds)],
        "row_count": len(rows),
        "empty": not rows,
        "rows": rows,
        "mean_proved_pct": round(mean(r["proved_pct"] for r in rows), 2) if rows else 0.0,
        "programs_with_success": sum(r["success_rate"] > 0 for r in rows),
        "runs": runs_by_program,
    }
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(result, fh, indent=1, sort_keys=True)
            fh.write("\n")
    if table_path:
        with open(table_path, "w") as fh:
            fh.write(format_table(result))
    return result


def format_table(result: dict[str, Any]) -> str:
    if result["empty"]:
        return "(no programs)\n"
    header = [h for h, _, _ in COLUMNS]
    body = [[fmt.format(row[key]) for _, key, fmt in COLUMNS] for row in result["rows"]]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(x.ljust(w) for x, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)) for r in body]
    lines.append(f"mean proved %: {result['mean_proved_pct']:.1f}; "
                 f"programs with a full proof: {result['programs_with_success']}/{result['row_count']}")
    return "\n".join(lines) + "\n"
