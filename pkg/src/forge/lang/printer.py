from __future__ import annotations

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
    Unary,
    Var,
    While,
)

_PREC = {
    "==>": 1,
    "||": 2,
    "&&": 3,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY = 7
_ATOM = 8


def _prec(e: Expr) -> int:
    if isinstance(e, Quant):
        return 0
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return _UNARY
    if isinstance(e, IntLit) and e.value < 0:
        return _UNARY
    return _ATOM


def show(e: Expr, ctx: int = 0) -> str:
    """Render an expression with the minimal parentheses the parser needs."""
    text = _show(e)
    return f"({text})" if _prec(e) < ctx else text


def _show(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Result):
        return "\\result"
    if isinstance(e, Old):
        return f"\\old({show(e.expr)})"
    if isinstance(e, Unary):
        if e.op == "-" and isinstance(e.operand, IntLit):
            return f"-({show(e.operand)})"
        return f"{e.op}{show(e.operand, _UNARY)}"
    if isinstance(e, Binary):
        p = _PREC[e.op]
        if e.op == "==>":
            return f"{show(e.left, p + 1)} ==> {show(e.right, p)}"
        if p == 4:
            return f"{show(e.left, p + 1)} {e.op} {show(e.right, p + 1)}"
        return f"{show(e.left, p)} {e.op} {show(e.right, p + 1)}"
    if isinstance(e, Index):
        return f"{show(e.array, _ATOM)}[{show(e.index)}]"
    if isinstance(e, Length):
        return f"{show(e.array, _ATOM)}.length"
    if isinstance(e, Quant):
        return f"{e.kind} {e.var} in [{show(e.lo)}, {show(e.hi)}) :: {show(e.body)}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(show(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def show_stmt(s: Stmt, indent: int = 1) -> list[str]:
    pad = "  " * indent
    if isinstance(s, Skip):
        return [pad + "skip;"]
    if isinstance(s, Assign):
        return [f"{pad}{s.target} := {show(s.rhs)};"]
    if isinstance(s, Store):
        return [f"{pad}{s.array}[{show(s.index)}] := {show(s.rhs)};"]
    if isinstance(s, Seq):
        return [line for c in s.stmts for line in show_stmt(c, indent)]
    if isinstance(s, If):
        lines = [f"{pad}if ({show(s.cond)}) {{"]
        lines += show_stmt(s.then, indent + 1)
        if isinstance(s.orelse, Skip):
            lines.append(pad + "}")
        else:
            lines.append(pad + "} else {")
            lines += show_stmt(s.orelse, indent + 1)
            lines.append(pad + "}")
        return lines
    if isinstance(s, While):
        lines = [f"{pad}while ({show(s.cond)})"]
        lines += [f"{pad}  invariant {show(inv)};" for inv in s.invariants]
        lines.append(pad + "{")
        lines += show_stmt(s.body, indent + 1)
        lines.append(pad + "}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def show_program(p: Program) -> str:
    params = ", ".join(f"{n}: {t}" for n, t in p.params)
    head = f"method {p.name}({params})"
    if p.result is not None:
        head += f" returns ({p.result[0]}: {p.result[1]})"
    lines = [head]
    lines += [f"  requires {show(c)};" for c in p.pre]
    lines += [f"  ensures {show(c)};" for c in p.post]
    lines.append("{")
    lines += [f"  var {n}: {t};" for n, t in p.locals]
    if not isinstance(p.body, Skip) or not p.locals:
        lines += show_stmt(p.body)
    lines.append("}")
    return "\n".join(lines) + "\n"
