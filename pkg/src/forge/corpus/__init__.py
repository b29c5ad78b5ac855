"""Bundled example programs with golden loop invariants."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..lang.ast import Program
from ..lang.parser import parse_program
from ..lang.typecheck import typecheck


def corpus_dir() -> Path:
    return Path(str(resources.files("forge.corpus")))


def failing_dir() -> Path:
    return corpus_dir().parent / "failing"


def load_file(path) -> Program:
    return typecheck(parse_program(Path(path).read_text()))


def program_files(directory) -> list[Path]:
    return sorted(Path(directory).glob("*.mlw"))


def corpus_names() -> list[str]:
    return [p.stem for p in program_files(corpus_dir())]


def load(name: str) -> Program:
    for d in (corpus_dir(), failing_dir()):
        path = d / f"{name}.mlw"
        if path.exists():
            return load_file(path)
    raise KeyError(name)
