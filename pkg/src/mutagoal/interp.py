"""Deterministic tree-walking interpreter for MiniLang test cases.

Each statement executed and each expression node evaluated costs one step.
Tests run against a fresh heap; every failure mode is folded into the
returned :class:`TestOutcome` instead of being raised.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from mutagoal.frontend.nodes import (
    Assert,
    BinOp,
    Bind,
    BoolLit,
    Call,
    ExprStmt,
    FieldAssign,
    FieldRead,
    If,
    IntLit,
    Local,
    New,
    Not,
    Program,
    Return,
    SelfRef,
    TestCase,
    While,
)

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1
DEFAULT_BUDGET = 1_000_000
MAX_CALL_DEPTH = 200

PASS = "pass"
ASSERTION_FAILURE = "assertion-failure"
EXECUTION_ERROR = "execution-error"
BUDGET_EXCEEDED = "step-budget-exceeded"


@dataclass(frozen=True)
class CostModel:
    mode: str = "steps"  # "steps" | "wall"
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.mode not in ("steps", "wall"):
            raise ValueError(f"unknown cost mode {self.mode!r}")
        if self.budget <= 0:
            raise ValueError("step budget must be positive")


@dataclass(frozen=True)
class Verdict:
    kind: str
    location: Optional[str] = None
    expected: Any = None
    actual: Any = None
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.kind == PASS

    def describe(self) -> str:
        if self.kind == ASSERTION_FAILURE:
            return f"{self.location}: expected {self.expected!r}, got {self.actual!r}"
        if self.kind == EXECUTION_ERROR:
            return f"{self.location}: {self.error}"
        return self.kind


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    test_id: str
    verdict: Verdict
    steps_executed: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict.kind == PASS


class Obj:
    __slots__ = ("cls", "fields")

    def __init__(self, cls, fields: dict):
        self.cls = cls
        self.fields = fields

    def __repr__(self) -> str:
        return f"<{self.cls.name} {self.fields}>"


class _Budget(Exception):
    pass


class _Fault(Exception):
    def __init__(self, kind: str, loc):
        super().__init__(kind)
        self.kind = kind
        self.loc = loc


class _AssertFail(Exception):
    def __init__(self, loc, expected, actual):
        super().__init__()
        self.loc = loc
        self.expected = expected
        self.actual = actual


class _Frame:
    __slots__ = ("env", "this")

    def __init__(self, env: dict, this: Optional[Obj]):
        self.env = env
        self.this = this


_FALLTHROUGH = object()


def _show(value):
    if isinstance(value, Obj):
        return f"<{value.cls.name} object>"
    return value


def _check_int(value, loc) -> int:
    if not INT_MIN <= value <= INT_MAX:
        raise _Fault("integer overflow", loc)
    return value


def _same_kind(a, b) -> bool:
    return type(a) is type(b)


class Interpreter:
    """Single-execution interpreter bound to one (possibly mutated) program."""

    def __init__(self, program: Program, cost: CostModel = CostModel()):
        self.program = program
        self.classes = program.class_table
        self.budget = cost.budget
        self.steps = 0
        self.depth = 0
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)
        self._expr = {
            IntLit: self._int, BoolLit: self._bool, Local: self._local,
            FieldRead: self._field, BinOp: self._binop, Not: self._not,
            New: self._new, Call: self._call, SelfRef: self._selfref,
        }
        self._stmt = {
            Bind: self._s_bind, FieldAssign: self._s_assign, If: self._s_if,
            While: self._s_while, Return: self._s_return, ExprStmt: self._s_expr,
            Assert: self._s_assert,
        }

    # -- entry point ------------------------------------------------------

    def run(self, tid: str, test: TestCase) -> TestOutcome:
        self.steps = 0
        self.depth = 0
        started = time.perf_counter()
        frame = _Frame({}, None)
        try:
            for stmt in test.body:
                self.exec(stmt, frame)
            verdict = Verdict(PASS)
        except _AssertFail as exc:
            verdict = Verdict(ASSERTION_FAILURE, str(exc.loc), _show(exc.expected), _show(exc.actual))
        except _Fault as exc:
            verdict = Verdict(EXECUTION_ERROR, str(exc.loc), error=exc.kind)
        except _Budget:
            verdict = Verdict(BUDGET_EXCEEDED)
        except RecursionError:
            verdict = Verdict(EXECUTION_ERROR, str(test.loc), error="stack overflow")
        elapsed = time.perf_counter() - started
        return TestOutcome(tid, verdict, min(self.steps, self.budget), elapsed)

    # -- statements -------------------------------------------------------

    def exec(self, stmt, frame: _Frame):
        self.steps += 1
        if self.steps > self.budget:
            raise _Budget()
        return self._stmt[type(stmt)](stmt, frame)

    def exec_block(self, stmts, frame: _Frame):
        for stmt in stmts:
            result = self.exec(stmt, frame)
            if result is not _FALLTHROUGH:
                return result
        return _FALLTHROUGH

    def _s_bind(self, stmt: Bind, frame):
        frame.env[stmt.name] = self.value(stmt.value, frame)
        return _FALLTHROUGH

    def _s_assign(self, stmt: FieldAssign, frame):
        value = self.value(stmt.value, frame)
        this = frame.this
        if not _same_kind(value, this.cls.field_defaults[stmt.name]):
            raise _Fault(f"cannot store {type(value).__name__} in field '{stmt.name}'", stmt.loc)
        this.fields[stmt.name] = value
        return _FALLTHROUGH

    def _s_if(self, stmt: If, frame):
        if self._cond(stmt.cond, frame):
            return self.exec_block(stmt.then, frame)
        return self.exec_block(stmt.orelse, frame)

    def _s_while(self, stmt: While, frame):
        while self._cond(stmt.cond, frame):
            result = self.exec_block(stmt.body, frame)
            if result is not _FALLTHROUGH:
                return result
        return _FALLTHROUGH

    def _s_return(self, stmt: Return, frame):
        return None if stmt.value is None else self.value(stmt.value, frame)

    def _s_expr(self, stmt: ExprStmt, frame):
        self.eval(stmt.expr, frame)
        return _FALLTHROUGH

    def _s_assert(self, stmt: Assert, frame):
        if stmt.kind == "assertEqual":
            actual = self.value(stmt.args[0], frame)
            expected = self.value(stmt.args[1], frame)
            if isinstance(actual, Obj) or isinstance(expected, Obj):
                equal = actual is expected
            else:
                equal = type(actual) is type(expected) and actual == expected
            if not equal:
                raise _AssertFail(stmt.loc, expected, actual)
            return _FALLTHROUGH
        value = self._cond(stmt.args[0], frame)
        wanted = stmt.kind == "assertTrue"
        if value is not wanted:
            raise _AssertFail(stmt.loc, wanted, value)
        return _FALLTHROUGH

    # -- expressions ------------------------------------------------------

    def eval(self, expr, frame: _Frame):
        self.steps += 1
        if self.steps > self.budget:
            raise _Budget()
        return self._expr[type(expr)](expr, frame)

    def value(self, expr, frame):
        """Evaluate ``expr`` where a value is required (void results are faults)."""
        result = self.eval(expr, frame)
        if result is None:
            raise _Fault("void invocation used as a value", expr.loc)
        return result

    def _cond(self, expr, frame) -> bool:
        value = self.eval(expr, frame)
        if type(value) is not bool:
            raise _Fault("condition is not a boolean", expr.loc)
        return value

    def _int(self, expr: IntLit, frame):
        return expr.value

    def _bool(self, expr: BoolLit, frame):
        return expr.value

    def _local(self, expr: Local, frame):
        try:
            return frame.env[expr.name]
        except KeyError:
            raise _Fault(f"local '{expr.name}' read before assignment", expr.loc) from None

    def _field(self, expr: FieldRead, frame):
        return frame.this.fields[expr.name]

    def _selfref(self, expr: SelfRef, frame):
        return frame.this

    def _not(self, expr: Not, frame):
        return not self._cond(expr.operand, frame)

    def _binop(self, expr: BinOp, frame):
        op = expr.op
        if op == "and" or op == "or":
            left = self._cond(expr.left, frame)
            if (op == "and") != left:
                return left
            return self._cond(expr.right, frame)
        a = self.value(expr.left, frame)
        b = self.value(expr.right, frame)
        if op == "==" or op == "!=":
            if isinstance(a, Obj) and isinstance(b, Obj):
                eq = a is b
            elif type(a) is type(b):
                eq = a == b
            else:
                raise _Fault(f"cannot compare {type(a).__name__} with {type(b).__name__}", expr.loc)
            return eq if op == "==" else not eq
        if type(a) is not int or type(b) is not int:
            raise _Fault(f"operator '{op}' needs integers", expr.loc)
        if op == "+":
            return _check_int(a + b, expr.loc)
        if op == "-":
            return _check_int(a - b, expr.loc)
        if op == "*":
            return _check_int(a * b, expr.loc)
        if op == "/" or op == "%":
            if b == 0:
                raise _Fault("division by zero", expr.loc)
            # truncating division; the remainder takes the dividend's sign
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            if op == "/":
                return _check_int(q, expr.loc)
            return a - b * q
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        raise _Fault(f"unknown operator '{op}'", expr.loc)

    def _new(self, expr: New, frame):
        cls = self.classes[expr.cls]
        fields = dict(cls.field_defaults)
        for f, arg in zip(cls.fields, expr.args):
            value = self.value(arg, frame)
            if not _same_kind(value, f.init):
                raise _Fault(f"cannot store {type(value).__name__} in field '{f.name}'", arg.loc)
            fields[f.name] = value
        return Obj(cls, fields)

    def _call(self, expr: Call, frame):
        receiver = self.eval(expr.receiver, frame)
        if not isinstance(receiver, Obj):
            raise _Fault(f"cannot invoke '{expr.method}' on a non-object", expr.loc)
        args = [self.value(a, frame) for a in expr.args]
        method = receiver.cls.method_table.get(expr.method)
        if method is None:
            raise _Fault(f"'{receiver.cls.name}' has no method '{expr.method}'", expr.loc)
        if len(method.params) != len(args):
            raise _Fault(f"'{receiver.cls.name}.{expr.method}' takes {len(method.params)} arguments",
                         expr.loc)
        if self.depth >= MAX_CALL_DEPTH:
            raise _Fault("stack overflow", expr.loc)
        self.depth += 1
        try:
            result = self.exec_block(method.body, _Frame(dict(zip(method.params, args)), receiver))
        finally:
            self.depth -= 1
        if method.returns_value:
            if result is _FALLTHROUGH:
                raise _Fault(f"'{receiver.cls.name}.{expr.method}' ended without returning", expr.loc)
            return result
        return None


def run_test(program: Program, test: TestCase, cost: CostModel = CostModel(),
             tid: Optional[str] = None) -> TestOutcome:
    if tid is None:
        tid = next(i for i, t in program.test_table.items() if t is test)
    return Interpreter(program, cost).run(tid, test)


def run_suite(program: Program, tests: Iterable[str | TestCase], cost: CostModel = CostModel(),
              early_stop: bool = False) -> list[TestOutcome]:
    """Run tests in order; with ``early_stop`` halt after the first non-pass.

    ``tests`` may hold test ids or :class:`TestCase` objects from ``program``.
    """
    interp = Interpreter(program, cost)
    table = program.test_table
    by_obj = None
    outcomes: list[TestOutcome] = []
    for item in tests:
        if isinstance(item, str):
            tid, test = item, table[item]
        else:
            if by_obj is None:
                by_obj = {id(t): i for i, t in table.items()}
            tid, test = by_obj[id(item)], item
        outcome = interp.run(tid, test)
        outcomes.append(outcome)
        if early_stop and not outcome.passed:
            break
    return outcomes
