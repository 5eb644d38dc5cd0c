"""Canonical MiniLang rendering. ``parse(pretty_print(p)) == p`` for any program."""

from __future__ import annotations

from mutagoal.frontend.nodes import (
    Assert,
    BinOp,
    Bind,
    BoolLit,
    Call,
    ClassDecl,
    ExprStmt,
    FieldAssign,
    FieldDecl,
    FieldRead,
    If,
    IntLit,
    Local,
    MethodDecl,
    New,
    Not,
    Program,
    Return,
    SelfRef,
    TestCase,
    TestSuite,
    While,
)

INDENT = "    "

_PREC = {
    "or": 1, "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}
_NOT_PREC = 3
_ATOM_PREC = 7


def _prec(expr) -> int:
    if isinstance(expr, BinOp):
        return _PREC[expr.op]
    if isinstance(expr, Not):
        return _NOT_PREC
    return _ATOM_PREC


def _wrap(expr, min_prec: int) -> str:
    text = format_expr(expr)
    return f"({text})" if _prec(expr) < min_prec else text


def format_expr(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, Local):
        return expr.name
    if isinstance(expr, FieldRead):
        return f"self.{expr.name}"
    if isinstance(expr, SelfRef):
        return "self"
    if isinstance(expr, BinOp):
        p = _PREC[expr.op]
        if p == 4:
            # comparisons do not chain, so both sides bind tighter
            return f"{_wrap(expr.left, p + 1)} {expr.op} {_wrap(expr.right, p + 1)}"
        return f"{_wrap(expr.left, p)} {expr.op} {_wrap(expr.right, p + 1)}"
    if isinstance(expr, Not):
        return f"not {_wrap(expr.operand, _NOT_PREC)}"
    if isinstance(expr, New):
        return f"new {expr.cls}({_args(expr.args)})"
    if isinstance(expr, Call):
        recv = expr.receiver
        if isinstance(recv, SelfRef):
            head = "self"
        else:
            head = format_expr(recv)
            # negative literals are the only non-atomic primary text
            if _prec(recv) < _ATOM_PREC or (isinstance(recv, IntLit) and recv.value < 0):
                head = f"({head})"
        return f"{head}.{expr.method}({_args(expr.args)})"
    raise TypeError(f"not an expression: {expr!r}")


def _args(args) -> str:
    return ", ".join(format_expr(a) for a in args)


def format_stmt(stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, Bind):
        return [f"{pad}{stmt.name} := {format_expr(stmt.value)}"]
    if isinstance(stmt, FieldAssign):
        return [f"{pad}self.{stmt.name} := {format_expr(stmt.value)}"]
    if isinstance(stmt, ExprStmt):
        return [f"{pad}{format_expr(stmt.expr)}"]
    if isinstance(stmt, Assert):
        return [f"{pad}{stmt.kind}({_args(stmt.args)})"]
    if isinstance(stmt, Return):
        if stmt.value is None:
            return [f"{pad}return"]
        return [f"{pad}return {format_expr(stmt.value)}"]
    if isinstance(stmt, If):
        lines = [f"{pad}if {format_expr(stmt.cond)} {{"]
        lines += _block(stmt.then, depth + 1)
        if stmt.orelse:
            lines.append(f"{pad}}} else {{")
            lines += _block(stmt.orelse, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, While):
        lines = [f"{pad}while {format_expr(stmt.cond)} {{"]
        lines += _block(stmt.body, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement: {stmt!r}")


def _block(stmts, depth: int) -> list[str]:
    lines: list[str] = []
    for s in stmts:
        lines += format_stmt(s, depth)
    return lines


def _literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _format_method(m: MethodDecl, depth: int) -> list[str]:
    pad = INDENT * depth
    ret = " returns" if m.returns_value else ""
    if not m.body:
        return [f"{pad}method {m.name}({', '.join(m.params)}){ret} {{ }}"]
    return ([f"{pad}method {m.name}({', '.join(m.params)}){ret} {{"]
            + _block(m.body, depth + 1) + [f"{pad}}}"])


def _format_class(c: ClassDecl) -> list[str]:
    if not c.fields and not c.methods:
        return [f"class {c.name} {{ }}"]
    lines = [f"class {c.name} {{"]
    lines += [f"{INDENT}field {f.name} := {_literal(f.init)}" for f in c.fields]
    for m in c.methods:
        lines += _format_method(m, 1)
    lines.append("}")
    return lines


def _format_suite(s: TestSuite) -> list[str]:
    if not s.tests:
        return [f"suite {s.name} {{ }}"]
    lines = [f"suite {s.name} {{"]
    for t in s.tests:
        lines.append(f"{INDENT}test {t.name} {{")
        lines += _block(t.body, 2)
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return lines


def pretty_print(node) -> str:
    """Render any program node as canonical MiniLang text."""
    if isinstance(node, Program):
        chunks = ["\n".join(_format_class(c)) for c in node.classes]
        chunks += ["\n".join(_format_suite(s)) for s in node.suites]
        return "\n\n".join(chunks) + "\n"
    if isinstance(node, ClassDecl):
        return "\n".join(_format_class(node)) + "\n"
    if isinstance(node, TestSuite):
        return "\n".join(_format_suite(node)) + "\n"
    if isinstance(node, TestCase):
        return "\n".join([f"test {node.name} {{"] + _block(node.body, 1) + ["}"]) + "\n"
    if isinstance(node, MethodDecl):
        return "\n".join(_format_method(node, 0)) + "\n"
    if isinstance(node, FieldDecl):
        return f"field {node.name} := {_literal(node.init)}"
    if isinstance(node, (Bind, FieldAssign, ExprStmt, Assert, Return, If, While)):
        return "\n".join(format_stmt(node))
    return format_expr(node)


def render_tree(program: Program) -> dict[str, str]:
    """Pretty-print a program back into a ``{path: text}`` source tree."""
    grouped: dict[str, list[str]] = {}
    for c in program.classes:
        grouped.setdefault(c.path, []).append("\n".join(_format_class(c)))
    for s in program.suites:
        grouped.setdefault(s.path, []).append("\n".join(_format_suite(s)))
    return {path: "\n\n".join(chunks) + "\n" for path, chunks in sorted(grouped.items())}
