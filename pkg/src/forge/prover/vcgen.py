"""Verification-condition generation by forward symbolic execution.

Every assignment introduces a fresh SSA symbol defined by an equation, so the
definitions can be asserted globally. Branches merge with `ite`, and facts
learned inside a branch (loop exit assumptions) are kept as implications
guarded by the branch condition. Loops use the havoc-and-assume encoding:
Initiation is checked on arrival, the modified variables are havocked, the
invariants and the guard are assumed for one arbitrary iteration
(Preservation), and the exit state assumes the invariants and the negated
guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..lang.ast import (
    Assign,
    Binary,
    Expr,
    If,
    Index,
    Length,
    Program,
    Quant,
    Seq,
    Skip,
    Stmt,
    Store,
    Type,
    Unary,
    While,
    modified_vars,
)
from ..lang.printer import show
from .encode import ArrayVal, Encoder, Value, conj_terms, int_term

INITIATION = "initiation"
PRESERVATION = "preservation"
POST = "post"
SAFETY = "safety"
TAUTOLOGY = "tautology"

LOOP_KINDS = (INITIATION, PRESERVATION)


@dataclass
class Context:
    """Declarations and global definitions shared by a batch of VCs."""

    decls: list[str] = field(default_factory=list)
    defs: list[str] = field(default_factory=list)

    def preamble(self) -> str:
        lines = list(self.decls)
        lines += [f"(assert {d})" for d in self.defs]
        return "\n".join(lines)


@dataclass(frozen=True)
class VC:
    id: str
    kind: str
    loop: Optional[int]
    index: Optional[int]
    detail: str
    hyps: tuple[str, ...]
    goal: str
    context: Context = field(compare=False, repr=False, hash=False)


class _Gen:
    def __init__(self, program: Program, invariants: Mapping[int, Sequence[Expr]],
                 only_loops: bool = False):
        self.program = program
        self.invariants = invariants
        self.only_loops = only_loops
        self.ctx = Context()
        self.enc = Encoder()
        self.vcs: list[VC] = []
        self.versions: dict[str, int] = {}
        self.safety_count = 0
        self.old: dict[str, Value] = {}

    # -- symbols -------------------------------------------------------
    def declare(self, name: str, sort: str) -> str:
        self.ctx.decls.append(f"(declare-const {name} {sort})")
        return name

    def fresh(self, base: str, sort: str) -> str:
        k = self.versions.get(base, 0) + 1
        self.versions[base] = k
        return self.declare(f"{base}@{k}", sort)

    def define(self, base: str, sort: str, term: str) -> str:
        sym = self.fresh(base, sort)
        self.ctx.defs.append(f"(= {sym} {term})")
        return sym

    def emit(self, kind: str, loop: Optional[int], index: Optional[int], detail: str,
             hyps: list[str], goal: str) -> None:
        if self.only_loops and kind not in LOOP_KINDS:
            return
        if kind == SAFETY:
            self.safety_count += 1
            vid = f"{SAFETY}:{self.safety_count}"
        elif kind == POST:
            vid = f"{POST}:{index}"
        else:
            vid = f"{kind}:{loop}:{index}"
        self.vcs.append(VC(vid, kind, loop, index, detail, tuple(hyps), goal, self.ctx))

    # -- expressions ---------------------------------------------------
    def term(self, e: Expr, state) -> Value:
        return self.enc.term(e, state, self.old)

    def safety(self, e: Expr, state, path: list[str], guards: tuple[str, ...] = ()) -> None:
        """Emit definedness obligations for runtime evaluation of `e`."""
        if isinstance(e, Binary):
            self.safety(e.left, state, path, guards)
            if e.op in ("&&", "==>"):
                g = guards + (self.term(e.left, state),)
            elif e.op == "||":
                g = guards + (f"(not {self.term(e.left, state)})",)
            else:
                g = guards
            self.safety(e.right, state, path, g)
            if e.op in ("/", "%"):
                self.emit(SAFETY, None, None, f"division in `{show(e)}`", path + list(guards),
                          f"(not (= {self.term(e.right, state)} 0))")
            return
        if isinstance(e, Unary):
            self.safety(e.operand, state, path, guards)
            return
        if isinstance(e, Index):
            self.safety(e.index, state, path, guards)
            arr = self.term(e.array, state)
            idx = self.term(e.index, state)
            hyps = path + list(guards)
            self.emit(SAFETY, None, None, f"null check for `{show(e)}`", hyps, f"(not {arr.null})")
            self.emit(SAFETY, None, None, f"bounds check for `{show(e)}`", hyps,
                      f"(and (<= 0 {idx}) (< {idx} {arr.length}))")
            return
        if isinstance(e, Length):
            arr = self.term(e.array, state)
            self.emit(SAFETY, None, None, f"null check for `{show(e)}`", path + list(guards),
                      f"(not {arr.null})")
            return
        if isinstance(e, Quant):
            raise ValueError("quantifiers cannot appear in program code")

    # -- statements ----------------------------------------------------
    def exec(self, s: Stmt, state: dict, path: list[str]) -> tuple[dict, list[str]]:
        if isinstance(s, Skip):
            return state, path
        if isinstance(s, Seq):
            for c in s.stmts:
                state, path = self.exec(c, state, path)
            return state, path
        if isinstance(s, Assign):
            self.safety(s.rhs, state, path)
            t = self.term(s.rhs, state)
            sort = "Bool" if self.program.var_types[s.target] == Type.BOOL else "Int"
            state = dict(state)
            state[s.target] = self.define(s.target, sort, t)
            return state, path
        if isinstance(s, Store):
            self.safety(s.index, state, path)
            self.safety(s.rhs, state, path)
            arr: ArrayVal = state[s.array]
            idx = self.term(s.index, state)
            hyps = list(path)
            where = f"`{s.array}[{show(s.index)}] := ...`"
            self.emit(SAFETY, None, None, f"null check for {where}", hyps, f"(not {arr.null})")
            self.emit(SAFETY, None, None, f"bounds check for {where}", hyps,
                      f"(and (<= 0 {idx}) (< {idx} {arr.length}))")
            data = self.define(f"{s.array}@data", "(Array Int Int)",
                               f"(store {arr.data} {idx} {self.term(s.rhs, state)})")
            state = dict(state)
            state[s.array] = ArrayVal(arr.null, arr.length, data)
            return state, path
        if isinstance(s, If):
            self.safety(s.cond, state, path)
            c = self.term(s.cond, state)
            st1, p1 = self.exec(s.then, state, path + [c])
            st2, p2 = self.exec(s.orelse, state, path + [f"(not {c})"])
            return self.merge(c, state, st1, st2), self.merge_path(c, path, p1, p2)
        if isinstance(s, While):
            return self.loop(s, state, path)
        raise TypeError(f"not a statement: {s!r}")

    def merge(self, c: str, base: dict, st1: dict, st2: dict) -> dict:
        out = dict(base)
        for name in self.program.declared:
            v1, v2 = st1[name], st2[name]
            if v1 == v2:
                out[name] = v1
            elif isinstance(v1, ArrayVal):
                data = self.define(f"{name}@data", "(Array Int Int)", f"(ite {c} {v1.data} {v2.data})")
                out[name] = ArrayVal(v1.null, v1.length, data)
            else:
                sort = "Bool" if self.program.var_types[name] == Type.BOOL else "Int"
                out[name] = self.define(name, sort, f"(ite {c} {v1} {v2})")
        return out

    @staticmethod
    def merge_path(c: str, base: list[str], p1: list[str], p2: list[str]) -> list[str]:
        # p1 = base + [c] + extra1 and p2 = base + [not c] + extra2
        extra1 = p1[len(base) + 1:]
        extra2 = p2[len(base) + 1:]
        out = list(base)
        if extra1:
            out.append(f"(=> {c} {conj_terms(extra1)})")
        if extra2:
            out.append(f"(=> (not {c}) {conj_terms(extra2)})")
        return out

    def loop(self, s: While, state: dict, path: list[str]) -> tuple[dict, list[str]]:
        invs = list(self.invariants.get(s.site, ()))
        for k, inv in enumerate(invs):
            self.emit(INITIATION, s.site, k, show(inv), path, self.term(inv, state))
        havoc = dict(state)
        for name in sorted(modified_vars(s.body)):
            v = state[name]
            if isinstance(v, ArrayVal):
                havoc[name] = ArrayVal(v.null, v.length, self.fresh(f"{name}@data", "(Array Int Int)"))
            else:
                sort = "Bool" if self.program.var_types[name] == Type.BOOL else "Int"
                havoc[name] = self.fresh(name, sort)
        assumed = [self.term(inv, havoc) for inv in invs]
        head = path + assumed
        self.safety(s.cond, havoc, head)
        g = self.term(s.cond, havoc)
        end_state, end_path = self.exec(s.body, havoc, head + [g])
        for k, inv in enumerate(invs):
            self.emit(PRESERVATION, s.site, k, show(inv), end_path, self.term(inv, end_state))
        return havoc, head + [f"(not {g})"]

    # -- program -------------------------------------------------------
    def run(self) -> list[VC]:
        p = self.program
        state: dict[str, Value] = {}
        axioms: list[str] = []
        for name, t in p.params:
            if t == Type.ARRAY:
                arr = ArrayVal(self.declare(f"{name}@null", "Bool"),
                               self.declare(f"{name}@len", "Int"),
                               self.declare(f"{name}@data@0", "(Array Int Int)"))
                axioms.append(f"(<= 0 {arr.length})")
                state[name] = arr
            else:
                state[name] = self.declare(f"{name}@0", "Bool" if t == Type.BOOL else "Int")
        for name, t in ([p.result] if p.result else []) + list(p.locals):
            state[name] = "false" if t == Type.BOOL else int_term(0)
        self.old = dict(state)
        self.ctx.defs.extend(axioms)
        path = [self.term(c, state) for c in p.pre]
        final, path = self.exec(p.body, state, path)
        result = final[p.result[0]] if p.result else None
        for k, clause in enumerate(p.post):
            self.emit(POST, None, k, show(clause), path, self.enc.term(clause, final, self.old, result))
        return self.vcs


def generate_vcs(program: Program, invariants: Mapping[int, Sequence[Expr]],
                 only_loops: bool = False) -> list[VC]:
    """All obligations of `program` annotated with `invariants` (by loop id)."""
    return _Gen(program, invariants, only_loops).run()


def tautology_vcs(program: Program, loop_id: int, assumptions: Sequence[Expr],
                  goals: Sequence[Expr]) -> list[VC]:
    """One [assume `assumptions`; assert goal] obligation per goal, over
    unconstrained values of the declared variables and their entry copies.

    Array nullness and length are shared between the two copies, since no
    statement can change them.
    """
    g = _Gen(program, {})
    state: dict[str, Value] = {}
    old: dict[str, Value] = {}
    for name, t in program.var_types.items():
        if t == Type.ARRAY:
            null = g.declare(f"{name}@null", "Bool")
            length = g.declare(f"{name}@len", "Int")
            g.ctx.defs.append(f"(<= 0 {length})")
            state[name] = ArrayVal(null, length, g.declare(f"{name}@data", "(Array Int Int)"))
            old[name] = ArrayVal(null, length, g.declare(f"{name}@old@data", "(Array Int Int)"))
        else:
            sort = "Bool" if t == Type.BOOL else "Int"
            state[name] = g.declare(name, sort)
            old[name] = g.declare(f"{name}@old", sort)
    hyps = tuple(g.enc.term(a, state, old) for a in assumptions)
    return [
        VC(f"{TAUTOLOGY}:{loop_id}:{k}", TAUTOLOGY, loop_id, k, show(goal), hyps,
           g.enc.term(goal, state, old), g.ctx)
        for k, goal in enumerate(goals)
    ]
