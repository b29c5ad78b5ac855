from __future__ import annotations

import time

import pytest

from forge.corpus import corpus_dir
from forge.driver import RunConfig
from forge.driver.corpus import run_corpus

CORPUS_SEEDS = 10

# criterion -> (passed, detail), filled by the acceptance tests
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE[name] = (passed, detail)
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


@pytest.fixture(scope="session")
def corpus_run(tmp_path_factory):
    """The full corpus under seeds 0..9, run once per session."""
    out = tmp_path_factory.mktemp("corpus")
    start = time.perf_counter()
    result = run_corpus(corpus_dir(), RunConfig(seed=0), seeds=CORPUS_SEEDS,
                        json_path=str(out / "corpus.json"), table_path=str(out / "corpus.txt"))
    result["_elapsed"] = time.perf_counter() - start
    result["_dir"] = out
    return result


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split()[0].lstrip("C"))):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
