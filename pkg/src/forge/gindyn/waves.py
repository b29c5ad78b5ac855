"""Mutation waves: seeded, exhaustive operator pipelines over the postcondition.

The schedule lives in a JSON file with this schema::

    {"version": 1, "max_mutants": <int>,
     "waves": [{"id": <int>, "kind": 1|2|3,
                "steps": ["sub" | "age" | "weak", ...],
                "parameterless": <bool>}, ...]}

Waves run in list order. Kind 1 seeds with the postcondition clauses, kind 2
with the predicate calls and quantified subformulas of the postcondition
(negated and unnegated), kind 3 with the extracted collection predicates.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Optional, Sequence

from ..lang.ast import Expr, Type, mentions_result
from .operators import MutantSet, aging_raw, substitution_raw, weakening_raw
from .pools import ExpressionPool, predicate_seeds

log = logging.getLogger(__name__)

KIND_NAMES = {1: "ClauseSub", 2: "PostPredicateSub", 3: "CollectionPredicateSub"}
STEP_NAMES = ("sub", "age", "weak")
DEFAULT_CAP = 200_000


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Wave:
    id: int
    kind: int
    steps: tuple[str, ...]
    parameterless: bool = False

    def describe(self) -> str:
        steps = " ; ".join(self.steps) or "identity"
        pool = "parameterless" if self.parameterless else "full"
        return f"wave {self.id} ({KIND_NAMES[self.kind]}: {steps}; {pool} pool)"


@dataclass(frozen=True)
class Schedule:
    waves: tuple[Wave, ...]
    max_mutants: int = DEFAULT_CAP


def parse_schedule(data: Mapping) -> Schedule:
    try:
        waves = []
        for w in data["waves"]:
            steps = tuple(w.get("steps", ()))
            if any(s not in STEP_NAMES for s in steps) or len(steps) > 3:
                raise ConfigError(f"bad steps in wave {w.get('id')}: {steps}")
            if w["kind"] not in KIND_NAMES:
                raise ConfigError(f"bad kind in wave {w.get('id')}")
            waves.append(Wave(int(w["id"]), int(w["kind"]), steps, bool(w.get("parameterless", False))))
        ids = [w.id for w in waves]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate wave ids")
        return Schedule(tuple(waves), int(data.get("max_mutants", DEFAULT_CAP)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed wave schedule: {exc}") from exc


def load_schedule(path: Optional[str] = None) -> Schedule:
    if path is None:
        text = resources.files("forge.gindyn").joinpath("waves.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_schedule(json.loads(text))


@dataclass
class WaveResult:
    wave: Wave
    mutants: MutantSet
    raw: int
    aborted: bool
    dropped_result: int
    dropped_memo: int


def wave_seeds(wave: Wave, post: Sequence[Expr], pool: ExpressionPool,
               extracted: Sequence[Expr]) -> list[tuple[Expr, str]]:
    if wave.kind == 1:
        return [(c, f"clause{k}") for k, c in enumerate(post)]
    if wave.kind == 2:
        return [(s, f"pred{k}") for k, s in enumerate(predicate_seeds(post, pool.scope))]
    return [(s, f"coll{k}") for k, s in enumerate(extracted)]


def run_wave(wave: Wave, post: Sequence[Expr], pool: ExpressionPool, memo: set[str],
             var_types: Mapping[str, Type], result: Optional[Type] = None,
             extracted: Sequence[Expr] = (), cap: int = DEFAULT_CAP) -> WaveResult:
    """Seed, apply every step to the whole mutant set, then drop mutants that
    mention `\\result` or were produced by an earlier wave (`memo`)."""
    current = MutantSet()
    for f, tag in wave_seeds(wave, post, pool, extracted):
        current.add(f, wave.id, (f"seed:{tag}",))
    ints = pool.int_pool(wave.parameterless)
    raw = 0
    aborted = False
    for step in wave.steps:
        nxt = MutantSet()
        for mut in list(current):
            if step == "sub":
                gen = substitution_raw(mut.formula, ints, var_types, result)
            elif step == "age":
                gen = aging_raw(mut.formula, var_types, result)
            else:
                gen = weakening_raw(mut.formula, pool.bools)
            for f, desc in gen:
                raw += 1
                if raw > cap:
                    aborted = True
                    break
                nxt.add(f, wave.id, mut.chain + (desc,))
            if aborted:
                break
        if aborted:
            for key, mut in nxt.items.items():
                current.items.setdefault(key, mut)
            log.warning("%s exceeded %d raw mutants; keeping the partial set", wave.describe(), cap)
            break
        current = nxt
    out = MutantSet()
    dropped_result = dropped_memo = 0
    for key, mut in current.items.items():
        if mentions_result(mut.formula):
            dropped_result += 1
        elif key in memo:
            dropped_memo += 1
        else:
            out.items[key] = mut
    memo.update(out.items.keys())
    return WaveResult(wave, out, raw, aborted, dropped_result, dropped_memo)


__all__ = [
    "ConfigError",
    "KIND_NAMES",
    "Schedule",
    "Wave",
    "WaveResult",
    "load_schedule",
    "parse_schedule",
    "run_wave",
    "wave_seeds",
]
