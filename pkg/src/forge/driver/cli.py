"""Command-line entry point: `forge prove FILE` and `forge corpus DIR`."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from ..gindyn import ConfigError
from ..lang.errors import LangError
from ..prover import SolverConfig
from ..prover.solver import default_solver_path
from .corpus import format_table, run_corpus
from .run import RunConfig, run_dynamate


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=300, help="generated inputs per iteration")
    p.add_argument("--max-iterations", type=int, default=20)
    p.add_argument("--solver", default=None, help="path to an SMT-LIB solver binary (z3)")
    p.add_argument("--vc-timeout", type=float, default=10.0, help="seconds per solver query")
    p.add_argument("--waves", default=None, help="wave schedule JSON file")
    p.add_argument("--max-mutants", type=int, default=None, help="raw mutant cap per wave")
    p.add_argument("--dump-tests", default=None, metavar="DIR")
    p.add_argument("--dump-vcs", default=None, metavar="DIR")
    p.add_argument("--provenance", default=None, metavar="FILE", help="log every generated mutant")
    p.add_argument("-v", "--verbose", action="store_true")


def _config(args: argparse.Namespace, report: Optional[str] = None) -> RunConfig:
    solver = SolverConfig(path=args.solver or default_solver_path(), timeout=args.vc_timeout,
                          dump_dir=args.dump_vcs)
    return RunConfig(test_budget=args.budget, max_iterations=args.max_iterations,
                     waves_path=args.waves, seed=args.seed, solver=solver,
                     max_mutants=args.max_mutants, report_path=report,
                     dump_tests=args.dump_tests, provenance_path=args.provenance)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forge", description="Loop-invariant inference and verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    prove = sub.add_parser("prove", help="infer invariants and prove one program")
    prove.add_argument("file")
    prove.add_argument("--report", default=None, metavar="FILE.json")
    _common(prove)
    corpus = sub.add_parser("corpus", help="run every program of a directory")
    corpus.add_argument("dir")
    corpus.add_argument("--seeds", type=int, default=10)
    corpus.add_argument("--json", default=None, metavar="FILE.json")
    corpus.add_argument("--table", default=None, metavar="FILE.txt")
    _common(corpus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "prove":
            from ..corpus import load_file

            program = load_file(args.file)
            report = run_dynamate(program, _config(args, args.report))
            data = report.to_json()
            print(f"{report.program}: {report.outcome} ({report.reason}) after {report.iterations} "
                  f"iteration(s); obligations {data['obligations']['discharged']}/"
                  f"{data['obligations']['total']}, program obligations "
                  f"{data['obligations']['proved_pct']:.1f}% discharged")
            for lid, cands in sorted(report.proved.items()):
                for c in cands:
                    print(f"  loop {lid}: invariant {c.text()}    [{c.origin.label()}]")
            return 0 if report.success else 1
        result = run_corpus(args.dir, _config(args), seeds=args.seeds,
                            json_path=args.json, table_path=args.table)
        sys.stdout.write(format_table(result))
        if not args.json and not args.table and args.verbose:
            print(json.dumps(result["rows"], indent=1))
        return 0
    except (LangError, ConfigError, OSError) as exc:
        print(f"forge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
