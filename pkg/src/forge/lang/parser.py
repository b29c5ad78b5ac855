"""Recursive-descent parser for `.mlw` sources.

The concrete syntax is described in `lang.md` at the repository root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .ast import (
    Assign,
    Binary,
    BoolLit,
    Call,
    Expr,
    If,
    Index,
    IntLit,
    Length,
    NullLit,
    Old,
    Program,
    Quant,
    Result,
    Seq,
    Skip,
    Stmt,
    Store,
    Type,
    Unary,
    Var,
    While,
    free_vars,
    mentions_result,
    stmt_exprs,
    walk,
)
from .errors import DuplicateDeclaration, ParseError, UnknownIdentifier, UnknownPredicate

KEYWORDS = {
    "method", "returns", "requires", "ensures", "var", "while", "if", "else",
    "skip", "invariant", "forall", "exists", "in", "true", "false", "null",
    "int", "bool",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<special>\\old|\\result)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>==>|::|:=|==|!=|<=|>=|&&|\|\||[-+*/%<>!()\[\]{},;:.])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str, predicates: Optional[set[str]] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.loop_counter = 0
        self.branch_counter = 0
        if predicates is None:
            from .predicates import LIBRARY

            predicates = set(LIBRARY)
        self.predicates = predicates

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        return self.tok.text in texts and self.tok.kind in ("op", "kw", "special")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    # -- declarations --------------------------------------------------
    def parse_type(self) -> Type:
        if self.at("bool"):
            self.advance()
            return Type.BOOL
        self.expect("int")
        if self.at("["):
            self.advance()
            self.expect("]")
            return Type.ARRAY
        return Type.INT

    def parse_program(self) -> Program:
        self.expect("method")
        name = self.ident()
        self.expect("(")
        params: list[tuple[str, Type]] = []
        if not self.at(")"):
            while True:
                pname = self.ident()
                self.expect(":")
                params.append((pname, self.parse_type()))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        result = None
        if self.at("returns"):
            self.advance()
            self.expect("(")
            rname = self.ident()
            self.expect(":")
            rtype = self.parse_type()
            self.expect(")")
            result = (rname, rtype)
        pre: list[Expr] = []
        post: list[Expr] = []
        while self.at("requires", "ensures"):
            which = self.advance().text
            clause = self.parse_expr()
            self.expect(";")
            (pre if which == "requires" else post).append(clause)
        self.expect("{")
        locals_: list[tuple[str, Type]] = []
        while self.at("var"):
            self.advance()
            lname = self.ident()
            self.expect(":")
            ltype = self.parse_type()
            self.expect(";")
            locals_.append((lname, ltype))
        body = self.parse_stmts_until("}")
        self.expect("}")
        if self.tok.kind != "eof":
            self.error("trailing input after method body")
        program = Program(name, tuple(params), tuple(locals_), body, tuple(pre), tuple(post), result)
        check_scopes(program, self.predicates)
        return program

    # -- statements ----------------------------------------------------
    def parse_stmts_until(self, closer: str) -> Stmt:
        stmts: list[Stmt] = []
        while not self.at(closer):
            if self.tok.kind == "eof":
                self.error(f"expected {closer!r} before end of input")
            stmts.append(self.parse_stmt())
        if len(stmts) == 1:
            return stmts[0]
        if not stmts:
            return Skip()
        return Seq(tuple(stmts))

    def parse_block(self) -> Stmt:
        self.expect("{")
        body = self.parse_stmts_until("}")
        self.expect("}")
        return body

    def parse_stmt(self) -> Stmt:
        if self.at("skip"):
            self.advance()
            self.expect(";")
            return Skip()
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            self.advance()
            site = self.loop_counter
            self.loop_counter += 1
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            invs: list[Expr] = []
            while self.at("invariant"):
                self.advance()
                invs.append(self.parse_expr())
                self.expect(";")
            body = self.parse_block()
            return While(cond, body, site, tuple(invs))
        target = self.ident()
        if self.at("["):
            self.advance()
            index = self.parse_expr()
            self.expect("]")
            self.expect(":=")
            rhs = self.parse_expr()
            self.expect(";")
            return Store(target, index, rhs)
        self.expect(":=")
        rhs = self.parse_expr()
        self.expect(";")
        return Assign(target, rhs)

    def parse_if(self) -> Stmt:
        self.expect("if")
        bid = self.branch_counter
        self.branch_counter += 1
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_block()
        orelse: Stmt = Skip()
        if self.at("else"):
            self.advance()
            orelse = self.parse_if() if self.at("if") else self.parse_block()
        return If(cond, then, orelse, bid)

    # -- expressions ---------------------------------------------------
    def parse_expr(self) -> Expr:
        if self.at("forall", "exists"):
            kind = self.advance().text
            var = self.ident()
            self.expect("in")
            self.expect("[")
            lo = self.parse_expr()
            self.expect(",")
            hi = self.parse_expr()
            self.expect(")")
            self.expect("::")
            body = self.parse_expr()
            return Quant(kind, var, lo, hi, body)
        return self.parse_implies()

    def parse_implies(self) -> Expr:
        left = self.parse_binary(0)
        if self.at("==>"):
            self.advance()
            right = self.parse_expr()  # right associative; may be a quantifier
            return Binary("==>", left, right)
        return left

    _LEVELS = (("||",), ("&&",), ("==", "!=", "<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%"))

    def parse_binary(self, level: int) -> Expr:
        if level == len(self._LEVELS):
            return self.parse_unary()
        ops = self._LEVELS[level]
        left = self.parse_binary(level + 1)
        if level == 2:  # comparisons do not chain
            if self.tok.kind == "op" and self.tok.text in ops:
                op = self.advance().text
                left = Binary(op, left, self.parse_binary(level + 1))
            return left
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance().text
            left = Binary(op, left, self.parse_binary(level + 1))
        return left

    def parse_unary(self) -> Expr:
        if self.at("!"):
            self.advance()
            return Unary("!", self.parse_unary())
        if self.at("-"):
            self.advance()
            if self.tok.kind == "int":
                return self.parse_postfix(IntLit(-int(self.advance().text)))
            return Unary("-", self.parse_unary())
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, e: Expr) -> Expr:
        while True:
            if self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                e = Index(e, idx)
            elif self.at("."):
                self.advance()
                tok = self.tok
                if self.ident() != "length":
                    self.error("only `.length` is supported", tok)
                e = Length(e)
            else:
                return e

    def parse_primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if self.at("true", "false"):
            self.advance()
            return BoolLit(tok.text == "true")
        if self.at("null"):
            self.advance()
            return NullLit()
        if self.at("\\result"):
            self.advance()
            return Result()
        if self.at("\\old"):
            self.advance()
            self.expect("(")
            inner = self.parse_expr()
            self.expect(")")
            return Old(inner)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                if tok.text not in self.predicates:
                    raise UnknownPredicate(f"unknown predicate {tok.text!r}", tok.line, tok.col)
                self.advance()
                args: list[Expr] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.at(","):
                            break
                        self.advance()
                self.expect(")")
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        self.error(f"unexpected token {tok.text or 'end of input'!r}")


def check_scopes(program: Program, predicates: set[str]) -> None:
    seen: set[str] = set()
    for name in program.declared:
        if name in seen:
            raise DuplicateDeclaration(f"{name!r} declared more than once")
        seen.add(name)

    def check(e: Expr, where: str, allow_old: bool, allow_result: bool) -> None:
        for name in sorted(free_vars(e)):
            if name not in seen:
                raise UnknownIdentifier(f"undeclared identifier {name!r} in {where}")
        for _, node in walk(e):
            if isinstance(node, Quant) and node.var in seen:
                raise DuplicateDeclaration(f"quantified variable {node.var!r} shadows a declaration in {where}")
            if isinstance(node, Old) and not allow_old:
                raise ParseError(f"\\old is not allowed in {where}")
            if isinstance(node, Call) and node.name not in predicates:
                raise UnknownPredicate(f"unknown predicate {node.name!r}")
        if mentions_result(e) and not allow_result:
            raise ParseError(f"\\result is not allowed in {where}")

    for e in program.pre:
        check(e, "a precondition", False, False)
    for e in program.post:
        check(e, "a postcondition", True, program.result is not None)
    for e in stmt_exprs(program.body):
        check(e, "the method body", False, False)
    from .ast import walk_stmts

    for s in walk_stmts(program.body):
        if isinstance(s, (Assign, Store)):
            target = s.target if isinstance(s, Assign) else s.array
            if target not in seen:
                raise UnknownIdentifier(f"assignment to undeclared {target!r}")
        if isinstance(s, While):
            for inv in s.invariants:
                check(inv, "a loop invariant", True, False)


def parse_program(text: str) -> Program:
    return Parser(text).parse_program()


def parse_formula(text: str, predicates: Optional[set[str]] = None) -> Expr:
    p = Parser(text, predicates)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error("trailing input after formula")
    return e
