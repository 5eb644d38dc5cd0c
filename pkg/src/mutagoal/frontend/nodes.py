"""Immutable source model for MiniLang programs and their test suites.

Every node is a frozen dataclass. Source locations ride along on each node
but are excluded from equality, so two programs compare equal when they are
structurally identical regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass
from functools import cached_property
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Loc:
    path: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.path}:{self.line}:{self.col}"


NO_LOC = Loc("<synthetic>", 0, 0)


def _loc():
    return field(default=NO_LOC, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    loc: Loc = _loc()


@dataclass(frozen=True)
class Local:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class FieldRead:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class SelfRef:
    """The ``self`` receiver of an invocation. Never a standalone value."""

    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Not:
    operand: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class New:
    cls: str
    args: tuple[Expr, ...] = ()
    loc: Loc = _loc()


@dataclass(frozen=True)
class Call:
    receiver: Expr
    method: str
    args: tuple[Expr, ...] = ()
    # class owning the target method when statically known; filled by resolution
    target: Optional[str] = field(default=None, compare=False)
    loc: Loc = _loc()


Expr = Union[IntLit, BoolLit, Local, FieldRead, SelfRef, BinOp, Not, New, Call]

ARITH_OPS = ("+", "-", "*", "/", "%")
REL_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("and", "or")


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Bind:
    name: str
    value: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class FieldAssign:
    name: str
    value: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...] = ()
    loc: Loc = _loc()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple[Stmt, ...]
    loc: Loc = _loc()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    loc: Loc = _loc()


ASSERT_ARITY = {"assertTrue": 1, "assertFalse": 1, "assertEqual": 2}


@dataclass(frozen=True)
class Assert:
    kind: str
    args: tuple[Expr, ...]
    loc: Loc = _loc()


Stmt = Union[Bind, FieldAssign, If, While, Return, ExprStmt, Assert]


# -- declarations ------------------------------------------------------------


@dataclass(frozen=True)
class FieldDecl:
    name: str
    init: Union[int, bool]
    loc: Loc = _loc()


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]
    returns_value: bool = False
    loc: Loc = _loc()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    fields: tuple[FieldDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    path: str = "<synthetic>"
    loc: Loc = _loc()

    @cached_property
    def method_table(self) -> dict[str, MethodDecl]:
        return {m.name: m for m in self.methods}

    @cached_property
    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)

    @cached_property
    def field_defaults(self) -> dict[str, int | bool]:
        return {f.name: f.init for f in self.fields}


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keep pytest from collecting this class

    name: str
    body: tuple[Stmt, ...]
    loc: Loc = _loc()


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    name: str
    tests: tuple[TestCase, ...] = ()
    path: str = "<synthetic>"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDecl, ...] = ()
    suites: tuple[TestSuite, ...] = ()
    lints: tuple[str, ...] = field(default=(), compare=False)

    @cached_property
    def class_table(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    @cached_property
    def test_table(self) -> dict[str, TestCase]:
        """Test id (``Suite.test``) to test case, in global order."""
        return {test_id(s, t): t for s, t in self.iter_tests()}

    def iter_tests(self) -> Iterator[tuple[TestSuite, TestCase]]:
        for suite in self.suites:
            for test in suite.tests:
                yield suite, test

    @property
    def test_ids(self) -> list[str]:
        return list(self.test_table)

    def suite_of(self, tid: str) -> TestSuite:
        name = tid.split(".", 1)[0]
        for suite in self.suites:
            if suite.name == name:
                return suite
        raise KeyError(tid)

    @cached_property
    def source_map(self) -> dict[tuple, Loc]:
        """Node address (see :func:`walk`) to its source location."""
        return {addr: node.loc for addr, node in walk(self) if hasattr(node, "loc")}


def test_id(suite: TestSuite, test: TestCase) -> str:
    return f"{suite.name}.{test.name}"


test_id.__test__ = False


Node = Union[Expr, Stmt, FieldDecl, MethodDecl, ClassDecl, TestCase, TestSuite, Program]


def children(node) -> Iterator[tuple[tuple, object]]:
    """Yield ``(relative address, child node)`` for every direct child node."""
    for f in fields(node):
        if f.name in ("loc", "target", "lints"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, tuple):
            for i, item in enumerate(value):
                if is_dataclass(item):
                    yield (f.name, i), item
        elif is_dataclass(value):
            yield (f.name,), value


def walk(node, addr: tuple = ()) -> Iterator[tuple[tuple, object]]:
    """Pre-order traversal yielding ``(address, node)`` pairs.

    An address is a flat tuple of attribute names and tuple indices leading
    from the root to the node, e.g. ``("classes", 0, "methods", 2, "body", 0)``.
    """
    yield addr, node
    for rel, child in children(node):
        yield from walk(child, addr + rel)


def node_at(root, addr: tuple):
    node = root
    for step in addr:
        node = node[step] if isinstance(step, int) else getattr(node, step)
    return node


def replace_at(root, addr: tuple, new):
    """Return a copy of ``root`` with the node at ``addr`` swapped for ``new``.

    Only the spine from the root to the replaced node is rebuilt; every other
    subtree is shared with the original.
    """
    from dataclasses import replace

    if not addr:
        return new
    step, rest = addr[0], addr[1:]
    if isinstance(step, str) and rest and isinstance(rest[0], int):
        seq = getattr(root, step)
        idx = rest[0]
        item = replace_at(seq[idx], rest[1:], new)
        return replace(root, **{step: seq[:idx] + (item,) + seq[idx + 1:]})
    return replace(root, **{step: replace_at(getattr(root, step), rest, new)})
