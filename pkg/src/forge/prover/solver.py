"""SMT-LIB v2 transport to an external solver process.

Each query runs in a fresh solver process. Verdicts are cached by script
text, so identical queries are answered once per process.
"""

from __future__ import annotations

import hashlib
import logging
import os
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .encode import PRELUDE, conj_terms
from .vcgen import VC

log = logging.getLogger(__name__)

VALID = "valid"
INVALID = "invalid"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    kind: str
    model: Optional[str] = None
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.kind == VALID


def default_solver_path() -> str:
    found = shutil.which("z3")
    if found:
        return found
    try:  # the z3-solver wheel ships the binary next to its Python bindings
        import z3

        candidate = os.path.join(os.path.dirname(z3.__file__), "lib", "z3")
        if os.path.exists(candidate):
            return candidate
    except ImportError:
        pass
    return "z3"


@dataclass
class SolverConfig:
    path: str = field(default_factory=default_solver_path)
    timeout: float = 10.0
    # The resource limit is the deterministic budget and must bind well
    # before the wall-clock timeout (about 3 s on a laptop).
    rlimit: int = 5_000_000
    # Budget for deciding a closed goal value left over in a countermodel;
    # an undecided value only delays that goal to the next batch.
    closed_rlimit: int = 100_000
    # A low eager threshold cuts instantiation chains between array quantifiers.
    extra: tuple[str, ...] = ("smt.qi.eager_threshold=3",)
    dump_dir: Optional[str] = None


@dataclass
class SolverStats:
    queries: int = 0
    cache_hits: int = 0
    crashes: int = 0


_CACHE: dict[str, tuple[str, str]] = {}
BATCH = 200


def _sexp_items(text: str) -> list[str]:
    """Top-level items of the outermost list in `text`."""
    items: list[str] = []
    depth = 0
    start = -1
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
            if depth == 2:
                start = k
        elif ch == ")":
            if depth == 2 and start >= 0:
                items.append(text[start:k + 1])
                start = -1
            depth -= 1
            if depth == 0:
                break
    return items


class Solver:
    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self.stats = SolverStats()

    # -- transport -----------------------------------------------------
    def raw(self, script: str) -> tuple[str, str]:
        """Run `script`; return (status, remaining output)."""
        cached = _CACHE.get(script)
        if cached is not None:
            self.stats.cache_hits += 1
            return cached
        self.stats.queries += 1
        if self.config.dump_dir:
            self._dump(script)
        cmd = [self.config.path, "-in", "-smt2", f"-T:{max(1, int(self.config.timeout))}", *self.config.extra]
        try:
            proc = subprocess.run(cmd, input=script, capture_output=True, text=True,
                                  timeout=self.config.timeout + 5)
            out = proc.stdout.strip()
        except (subprocess.TimeoutExpired, OSError) as exc:
            self.stats.crashes += 1
            log.warning("solver failure: %s", exc)
            return (UNKNOWN, f"crash: {exc}")
        first, _, rest = out.partition("\n")
        first = first.strip()
        if first == "unsat":
            status = VALID
        elif first == "sat":
            status = INVALID
        else:
            status = UNKNOWN
            rest = first or proc.stderr.strip()
        result = (status, rest)
        _CACHE[script] = result
        return result

    def script(self, vc_context, hyps: Sequence[str], body: str, tail: str) -> str:
        return (
            PRELUDE
            + f"(set-option :rlimit {self.config.rlimit})\n"
            + vc_context.preamble() + "\n"
            + "".join(f"(assert {h})\n" for h in hyps)
            + body
            + "(check-sat)\n"
            + tail
        )

    # -- queries -------------------------------------------------------
    def check(self, vc: VC) -> Verdict:
        script = self.script(vc.context, vc.hyps, f"(assert (not {vc.goal}))\n", "(get-model)\n")
        status, rest = self.raw(script)
        if status == INVALID:
            return Verdict(INVALID, model=rest or None)
        if status == UNKNOWN:
            return Verdict(UNKNOWN, reason=rest or "incomplete")
        return Verdict(VALID)

    def _goal_values(self, output: str) -> dict[str, Optional[bool]]:
        """Truth values of the goal constants in a `get-value` answer.

        Values the solver leaves as closed quantified formulas over the
        model are decided by a follow-up query each.
        """
        values: dict[str, Optional[bool]] = {}
        closed: list[tuple[str, str]] = []
        for item in _sexp_items(output):
            name, _, term = item[1:-1].strip().partition(" ")
            term = term.strip()
            if term in ("true", "false"):
                values[name] = term == "true"
            else:
                closed.append((name, term))
        if closed:
            blocks = [f"(set-option :rlimit {self.config.closed_rlimit})\n(assert {term})\n(check-sat)\n"
                      for _, term in closed]
            answers = self._run_blocks(blocks) or [UNKNOWN] * len(blocks)
            for (name, _), st in zip(closed, answers):
                # sat: the formula holds in the model; unsat: it is false there
                values[name] = True if st == INVALID else False if st == VALID else None
        return values

    def check_each(self, vcs: Sequence[VC]) -> list[Verdict]:
        """Independent verdicts for `vcs`, sharing one solver process.

        The queries are separated by `(reset)`, so each is solved from a clean
        state exactly as in its own process; only the startup is shared.
        """
        blocks = [self.script(vc.context, vc.hyps, f"(assert (not {vc.goal}))\n", "") for vc in vcs]
        statuses: list[Optional[str]] = [(_CACHE.get(b) or (None, ""))[0] for b in blocks]
        todo = [i for i, st in enumerate(statuses) if st is None]
        self.stats.cache_hits += len(blocks) - len(todo)
        if len(todo) > 1:
            answers = self._run_blocks([blocks[i] for i in todo])
            if answers is not None:
                for i, st in zip(todo, answers):
                    statuses[i] = st
                    _CACHE[blocks[i]] = (st, "")
                todo = []
        for i in todo:
            statuses[i] = self.raw(blocks[i])[0]
        return [Verdict(st) if st != UNKNOWN else Verdict(UNKNOWN, reason="incomplete")
                for st in statuses]  # type: ignore[arg-type]

    def _run_blocks(self, blocks: Sequence[str]) -> Optional[list[str]]:
        self.stats.queries += len(blocks)
        script = "(reset)\n".join(blocks)
        if self.config.dump_dir:
            for b in blocks:
                self._dump(b)
        ms = max(1, int(self.config.timeout * 1000))
        cmd = [self.config.path, "-in", "-smt2", f"-t:{ms}", *self.config.extra]
        try:
            proc = subprocess.run(cmd, input=script, capture_output=True, text=True,
                                  timeout=len(blocks) * (self.config.timeout + 1) + 5)
        except (subprocess.TimeoutExpired, OSError) as exc:
            log.warning("solver failure on a query sequence: %s", exc)
            return None
        words = [w.strip() for w in proc.stdout.splitlines() if w.strip() in ("sat", "unsat", "unknown")]
        if len(words) != len(blocks):
            return None
        return [VALID if w == "unsat" else INVALID if w == "sat" else UNKNOWN for w in words]

    def _dump(self, script: str) -> None:
        os.makedirs(self.config.dump_dir, exist_ok=True)
        digest = hashlib.sha1(script.encode()).hexdigest()[:16]
        with open(os.path.join(self.config.dump_dir, f"{digest}.smt2"), "w") as fh:
            fh.write(script)

    def check_group(self, vcs: Sequence[VC]) -> list[Verdict]:
        """Verdicts for VCs sharing context and hypotheses, batched.

        The conjunction of all goals is checked first. A countermodel rules
        out the goals it falsifies; the rest are re-batched. If the solver
        cannot decide a batch, the goals are checked one by one.
        """
        verdicts: dict[int, Verdict] = {}
        pending = list(range(len(vcs)))
        while pending:
            if len(pending) == 1:
                verdicts[pending[0]] = self.check_each([vcs[pending[0]]])[0]
                break
            first = vcs[pending[0]]
            names = [f"g{i}" for i in range(len(pending))]
            # constants rather than define-funs, so the model assigns each a literal
            defs = "".join(f"(declare-const {n} Bool)\n(assert (= {n} {vcs[j].goal}))\n"
                           for n, j in zip(names, pending))
            body = defs + f"(assert (not {conj_terms(names)}))\n"
            status, rest = self.raw(self.script(first.context, first.hyps, body,
                                                f"(get-value ({' '.join(names)}))\n"))
            if status == VALID:
                for j in pending:
                    verdicts[j] = Verdict(VALID)
                break
            falsified = set()
            if status == INVALID:
                values = self._goal_values(rest)
                falsified = {j for n, j in zip(names, pending) if values.get(n) is False}
            if not falsified:
                for j, v in zip(pending, self.check_each([vcs[j] for j in pending])):
                    verdicts[j] = v
                break
            for j in sorted(falsified):
                verdicts[j] = Verdict(INVALID)
            pending = [j for j in pending if j not in falsified]
        return [verdicts[i] for i in range(len(vcs))]

    def check_all(self, vcs: Sequence[VC]) -> list[Verdict]:
        """Verdicts for arbitrary VCs, batching those with equal hypotheses."""
        groups: dict[tuple[int, tuple[str, ...]], list[int]] = {}
        for i, vc in enumerate(vcs):
            groups.setdefault((id(vc.context), vc.hyps), []).append(i)
        out: list[Optional[Verdict]] = [None] * len(vcs)
        for idxs in groups.values():
            ordered = sorted(idxs, key=lambda i: vcs[i].goal)
            for start in range(0, len(ordered), BATCH):
                chunk = ordered[start:start + BATCH]
                for i, v in zip(chunk, self.check_group([vcs[i] for i in chunk])):
                    out[i] = v
        return out  # type: ignore[return-value]
