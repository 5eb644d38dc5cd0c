"""Name resolution: every local, field, class and invocation target must exist.

Resolution also records the owning class on each :class:`Call` whenever it
can be pinned down statically, either from the receiver (``self``, ``new C``,
or a local last bound from ``new C``) or because exactly one class declares a
method of that name and arity.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from mutagoal.errors import MiniLangSyntaxError, ResolutionError
from mutagoal.frontend.nodes import (
    Assert,
    BinOp,
    Bind,
    BoolLit,
    Call,
    ClassDecl,
    ExprStmt,
    FieldAssign,
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
    TestSuite,
    While,
)

# local name -> statically known class (None when unknown or not an object)
Env = dict[str, Optional[str]]


class _Resolver:
    def __init__(self, program: Program):
        self.program = program
        self.classes = program.class_table
        self.owners: dict[str, list[ClassDecl]] = {}
        for cls in program.classes:
            for m in cls.methods:
                self.owners.setdefault(m.name, []).append(cls)
        self.cls: Optional[ClassDecl] = None
        self.method: Optional[MethodDecl] = None

    def fail(self, node, message: str) -> ResolutionError:
        return ResolutionError(f"{node.loc}: {message}")

    # -- declarations -----------------------------------------------------

    def run(self) -> Program:
        classes = tuple(self.resolve_class(c) for c in self.program.classes)
        self.cls = self.method = None
        suites = tuple(self.resolve_suite(s) for s in self.program.suites)
        return replace(self.program, classes=classes, suites=suites)

    def resolve_class(self, cls: ClassDecl) -> ClassDecl:
        self.cls = cls
        methods = []
        for m in cls.methods:
            self.method = m
            env: Env = {p: None for p in m.params}
            methods.append(replace(m, body=self.resolve_block(m.body, env)))
        return replace(cls, methods=tuple(methods))

    def resolve_suite(self, suite: TestSuite) -> TestSuite:
        tests = tuple(replace(t, body=self.resolve_block(t.body, {})) for t in suite.tests)
        return replace(suite, tests=tests)

    # -- statements -------------------------------------------------------

    def resolve_block(self, stmts: tuple, env: Env) -> tuple:
        return tuple(self.resolve_stmt(s, env) for s in stmts)

    def resolve_stmt(self, stmt, env: Env):
        if isinstance(stmt, Bind):
            value = self.resolve_expr(stmt.value, env)
            env[stmt.name] = self.static_class(value, env)
            return replace(stmt, value=value)
        if isinstance(stmt, FieldAssign):
            self.check_field(stmt, stmt.name)
            return replace(stmt, value=self.resolve_expr(stmt.value, env))
        if isinstance(stmt, ExprStmt):
            return replace(stmt, expr=self.resolve_expr(stmt.expr, env))
        if isinstance(stmt, Assert):
            return replace(stmt, args=tuple(self.resolve_expr(a, env) for a in stmt.args))
        if isinstance(stmt, Return):
            wants = self.method.returns_value
            if wants != (stmt.value is not None):
                what = "must return a value" if wants else "does not return a value"
                raise MiniLangSyntaxError(stmt.loc.path, stmt.loc.line, stmt.loc.col,
                                          f"method '{self.cls.name}.{self.method.name}' {what}")
            if stmt.value is None:
                return stmt
            return replace(stmt, value=self.resolve_expr(stmt.value, env))
        if isinstance(stmt, If):
            cond = self.resolve_expr(stmt.cond, env)
            then_env, else_env = dict(env), dict(env)
            then = self.resolve_block(stmt.then, then_env)
            orelse = self.resolve_block(stmt.orelse, else_env)
            self.merge(env, then_env, else_env)
            return replace(stmt, cond=cond, then=then, orelse=orelse)
        if isinstance(stmt, While):
            cond = self.resolve_expr(stmt.cond, env)
            body_env = dict(env)
            body = self.resolve_block(stmt.body, body_env)
            self.merge(env, body_env, dict(env))
            return replace(stmt, cond=cond, body=body)
        raise TypeError(f"unknown statement {stmt!r}")

    @staticmethod
    def merge(env: Env, a: Env, b: Env) -> None:
        # names bound on either path count as bound afterwards; the runtime
        # reports a read of a never-executed binding as an execution error
        for name in set(a) | set(b):
            ta, tb = a.get(name), b.get(name)
            env[name] = ta if ta == tb else None

    # -- expressions ------------------------------------------------------

    def check_field(self, node, name: str) -> None:
        if self.cls is None:
            raise self.fail(node, f"field access 'self.{name}' outside a method")
        if name not in self.cls.field_names:
            raise self.fail(node, f"class '{self.cls.name}' has no field '{name}'")

    def static_class(self, expr, env: Env) -> Optional[str]:
        if isinstance(expr, New):
            return expr.cls
        if isinstance(expr, Local):
            return env.get(expr.name)
        return None

    def resolve_expr(self, expr, env: Env):
        if isinstance(expr, (IntLit, BoolLit)):
            return expr
        if isinstance(expr, Local):
            if expr.name not in env:
                raise self.fail(expr, f"unbound local '{expr.name}'")
            return expr
        if isinstance(expr, FieldRead):
            self.check_field(expr, expr.name)
            return expr
        if isinstance(expr, SelfRef):
            if self.cls is None:
                raise self.fail(expr, "'self' outside a method")
            return expr
        if isinstance(expr, BinOp):
            return replace(expr, left=self.resolve_expr(expr.left, env),
                           right=self.resolve_expr(expr.right, env))
        if isinstance(expr, Not):
            return replace(expr, operand=self.resolve_expr(expr.operand, env))
        if isinstance(expr, New):
            cls = self.classes.get(expr.cls)
            if cls is None:
                raise self.fail(expr, f"unknown class '{expr.cls}'")
            if len(expr.args) > len(cls.fields):
                raise self.fail(expr, f"'new {expr.cls}' takes at most {len(cls.fields)} arguments")
            return replace(expr, args=tuple(self.resolve_expr(a, env) for a in expr.args))
        if isinstance(expr, Call):
            receiver = self.resolve_expr(expr.receiver, env)
            args = tuple(self.resolve_expr(a, env) for a in expr.args)
            if isinstance(receiver, SelfRef):
                known = self.cls.name
            else:
                known = self.static_class(receiver, env)
            target = self.resolve_target(expr, known)
            return replace(expr, receiver=receiver, args=args, target=target)
        raise TypeError(f"unknown expression {expr!r}")

    def resolve_target(self, call: Call, known: Optional[str]) -> Optional[str]:
        arity = len(call.args)
        if known is not None:
            method = self.classes[known].method_table.get(call.method)
            if method is None:
                raise self.fail(call, f"class '{known}' has no method '{call.method}'")
            if len(method.params) != arity:
                raise self.fail(call, f"'{known}.{call.method}' takes {len(method.params)} arguments, got {arity}")
            return known
        owners = [c for c in self.owners.get(call.method, ())
                  if len(c.method_table[call.method].params) == arity]
        if not owners:
            raise self.fail(call, f"no class declares method '{call.method}' with {arity} arguments")
        return owners[0].name if len(owners) == 1 else None


def resolve(program: Program) -> Program:
    return _Resolver(program).run()
