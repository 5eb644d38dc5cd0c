"""First-order mutant generation over production classes.

Operators:

=====  ===========================================================
AOR    ``+``↔``-``, ``*``↔``/``, ``%``→``*``
ROR    ``<``↔``<=``, ``>``↔``>=``, ``==``↔``!=``
LCR    ``and``↔``or``
CNB    negate the condition of each ``if`` / ``while``
CRP    integer literal ``c`` → ``c + 1``; and ``c`` → ``0`` when ``c != 0``
=====  ===========================================================

Mutants are patches: an address into the program tree plus the original and
replacement nodes. :func:`materialize` applies one to rebuild the program.
"""

from __future__ import annotations

import difflib
import hashlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from mutagoal.errors import StaleMutantError
from mutagoal.frontend.nodes import (
    BinOp,
    If,
    IntLit,
    Loc,
    MethodDecl,
    Not,
    Program,
    While,
    children,
    node_at,
    replace_at,
)
from mutagoal.frontend.printer import pretty_print, render_tree

INT_MAX = 2 ** 63 - 1

OPERATORS = ("AOR", "CNB", "CRP", "LCR", "ROR")

OPERATOR_DESCRIPTIONS = {
    "AOR": "arithmetic operator replacement",
    "CNB": "negate branch/loop condition",
    "CRP": "integer constant replacement",
    "LCR": "logical connector replacement",
    "ROR": "relational operator replacement",
}

AOR_TABLE = {"+": "-", "-": "+", "*": "/", "/": "*", "%": "*"}
ROR_TABLE = {"<": "<=", "<=": "<", ">": ">=", ">=": ">", "==": "!=", "!=": "=="}
LCR_TABLE = {"and": "or", "or": "and"}


@dataclass(frozen=True)
class Mutant:
    id: str
    operator: str
    path: str
    class_name: str
    method_name: str
    stmt_index: int
    seq: int
    address: tuple
    original: object = field(repr=False)
    replacement: object = field(repr=False)
    original_text: str = ""
    mutated_text: str = ""
    program_digest: str = field(default="", repr=False)
    loc: Loc = field(default=Loc("<synthetic>", 0, 0), repr=False)

    @property
    def method_ref(self) -> str:
        return f"{self.class_name}.{self.method_name}"

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "operator": self.operator,
            "class": self.class_name,
            "method": self.method_name,
            "location": str(self.loc),
            "original": self.original_text,
            "mutated": self.mutated_text,
        }


def program_digest(program: Program) -> str:
    cached = program.__dict__.get("_digest")
    if cached is None:
        h = hashlib.sha256()
        for path, text in render_tree(program).items():
            h.update(path.encode() + b"\0" + text.encode() + b"\0")
        cached = h.hexdigest()
        # programs are immutable, so memoizing on the instance is safe
        program.__dict__["_digest"] = cached
    return cached


# -- site enumeration ----------------------------------------------------------


def _expr_nodes(expr, addr: tuple) -> Iterator[tuple[tuple, object]]:
    """Pre-order walk of one expression tree."""
    yield addr, expr
    for rel, child in children(expr):
        yield from _expr_nodes(child, addr + rel)


def _stmt_exprs(stmt, addr: tuple) -> Iterator[tuple[tuple, object]]:
    """Expressions owned by ``stmt`` itself, not by its nested statements."""
    for rel, child in children(stmt):
        if rel[0] in ("then", "orelse", "body"):
            continue
        yield from _expr_nodes(child, addr + rel)


def _flatten(stmts, addr: tuple) -> Iterator[tuple[tuple, object]]:
    for i, stmt in enumerate(stmts):
        here = addr + (i,)
        yield here, stmt
        if isinstance(stmt, If):
            yield from _flatten(stmt.then, here + ("then",))
            yield from _flatten(stmt.orelse, here + ("orelse",))
        elif isinstance(stmt, While):
            yield from _flatten(stmt.body, here + ("body",))


def _variants(op: str, stmt, stmt_addr: tuple) -> Iterator[tuple[tuple, object, object]]:
    """Yield ``(address, original, replacement)`` for one operator at one statement."""
    if op == "CNB":
        if isinstance(stmt, (If, While)):
            yield stmt_addr + ("cond",), stmt.cond, Not(stmt.cond, stmt.cond.loc)
        return
    for addr, node in _stmt_exprs(stmt, stmt_addr):
        if op == "CRP":
            if isinstance(node, IntLit):
                c = node.value
                if c + 1 <= INT_MAX:
                    yield addr, node, replace(node, value=c + 1)
                if c != 0 and c + 1 != 0:
                    yield addr, node, replace(node, value=0)
        elif isinstance(node, BinOp):
            table = {"AOR": AOR_TABLE, "ROR": ROR_TABLE, "LCR": LCR_TABLE}[op]
            if node.op in table:
                yield addr, node, replace(node, op=table[node.op])


def iter_sites(method: MethodDecl, ops: Iterable[str]):
    """Yield ``(stmt_index, op, seq, address-in-method, original, replacement)``."""
    ordered = sorted(set(ops))
    for index, (addr, stmt) in enumerate(_flatten(method.body, ("body",))):
        for op in ordered:
            for seq, (site, original, new) in enumerate(_variants(op, stmt, addr)):
                yield index, op, seq, site, original, new


def generate_mutants(program: Program, enabled_ops: Iterable[str] = OPERATORS) -> list[Mutant]:
    """Enumerate every first-order mutant of the production classes.

    Order is file, then statement (pre-order within each method), then
    operator code, then variant sequence.
    """
    ops = set(enabled_ops)
    if not ops:
        raise ValueError("at least one mutation operator must be enabled")
    unknown = ops - set(OPERATORS)
    if unknown:
        raise ValueError(f"unknown mutation operators: {', '.join(sorted(unknown))}")
    digest = program_digest(program)
    mutants: list[Mutant] = []
    for ci, cls in enumerate(program.classes):
        for mi, method in enumerate(cls.methods):
            base = ("classes", ci, "methods", mi)
            for index, op, seq, site, original, new in iter_sites(method, ops):
                mutants.append(Mutant(
                    id=f"{cls.path}:{cls.name}.{method.name}:{index}:{op}:{seq}",
                    operator=op,
                    path=cls.path,
                    class_name=cls.name,
                    method_name=method.name,
                    stmt_index=index,
                    seq=seq,
                    address=base + site,
                    original=original,
                    replacement=new,
                    original_text=pretty_print(original),
                    mutated_text=pretty_print(new),
                    program_digest=digest,
                    loc=original.loc,
                ))
    return mutants


def materialize(program: Program, mutant: Mutant) -> Program:
    """Apply ``mutant`` to ``program``; the original is left untouched."""
    if mutant.program_digest and mutant.program_digest != program_digest(program):
        raise StaleMutantError(f"mutant {mutant.id} was generated from a different program")
    try:
        current = node_at(program, mutant.address)
    except (AttributeError, IndexError) as exc:
        raise StaleMutantError(f"mutant {mutant.id}: address no longer exists") from exc
    if current != mutant.original:
        raise StaleMutantError(
            f"mutant {mutant.id}: expected {mutant.original_text!r}, found {pretty_print(current)!r}"
        )
    return replace_at(program, mutant.address, mutant.replacement)


def mutant_diff(program: Program, mutant: Mutant) -> str:
    """Unified diff of the containing method before and after mutation."""
    method_addr = mutant.address[:4]
    before = node_at(program, method_addr)
    after = node_at(materialize(program, mutant), method_addr)
    lines_a = [line + "\n" for line in _method_lines(before)]
    lines_b = [line + "\n" for line in _method_lines(after)]
    return "".join(difflib.unified_diff(
        lines_a, lines_b, f"a/{mutant.path}", f"b/{mutant.path}", n=1,
    ))


def _method_lines(method: MethodDecl) -> list[str]:
    return pretty_print(method).splitlines()


def count_by_operator(mutants: Iterable[Mutant]) -> dict[str, int]:
    counts = {op: 0 for op in OPERATORS}
    for m in mutants:
        counts[m.operator] += 1
    return counts


__all__ = [
    "Mutant", "OPERATORS", "count_by_operator", "generate_mutants",
    "materialize", "mutant_diff", "program_digest",
]
