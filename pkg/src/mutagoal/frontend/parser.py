"""Recursive-descent parser for MiniLang.

The grammar is line-oriented: every statement ends at a newline or at the
closing brace of its block. Fields are always accessed through ``self.``
and ``:=`` is the only assignment form. See ``docs/minilang.md``.
"""

from __future__ import annotations

from typing import Mapping

from mutagoal.errors import DuplicateDeclarationError, MiniLangSyntaxError
from mutagoal.frontend.lexer import Token, tokenize
from mutagoal.frontend.nodes import (
    ASSERT_ARITY,
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
    Loc,
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

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

PRODUCTION_DIR = "src/"
TEST_DIR = "tests/"

_REL = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, text: str, path: str = "<input>"):
        self.path = path
        self.tokens = tokenize(text, path)
        self.pos = 0

    # -- token plumbing ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def loc(self, tok: Token | None = None) -> Loc:
        tok = tok or self.tok
        return Loc(self.path, tok.line, tok.col)

    def error(self, message: str, expected=(), tok: Token | None = None) -> MiniLangSyntaxError:
        tok = tok or self.tok
        return MiniLangSyntaxError(self.path, tok.line, tok.col, message, frozenset(expected))

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"unexpected {self._describe()}", {text})
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"unexpected {self._describe()}", {"identifier"})
        return self.advance()

    def _describe(self) -> str:
        tok = self.tok
        if tok.kind == "eof":
            return "end of input"
        if tok.kind == "nl":
            return "end of line"
        return repr(tok.text)

    def skip_newlines(self) -> None:
        while self.tok.kind == "nl":
            self.advance()

    def end_of_line(self) -> None:
        """A statement or declaration ends at a newline or before a ``}``."""
        if self.tok.kind == "nl":
            self.advance()
        elif not (self.at("}") or self.tok.kind == "eof"):
            raise self.error(f"unexpected {self._describe()}", {"end of line", "}"})

    # -- declarations -----------------------------------------------------

    def parse_file(self) -> tuple[list[ClassDecl], list[TestSuite]]:
        classes: list[ClassDecl] = []
        suites: list[TestSuite] = []
        self.skip_newlines()
        while self.tok.kind != "eof":
            if self.at("class"):
                classes.append(self.parse_class())
            elif self.at("suite"):
                suites.append(self.parse_suite())
            else:
                raise self.error(f"unexpected {self._describe()}", {"class", "suite"})
            self.skip_newlines()
        return classes, suites

    def parse_class(self) -> ClassDecl:
        start = self.expect("class")
        name = self.expect_ident().text
        self.expect("{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        while True:
            self.skip_newlines()
            if self.at("}"):
                self.advance()
                break
            if self.at("field"):
                fields.append(self.parse_field())
            elif self.at("method"):
                methods.append(self.parse_method())
            else:
                raise self.error(f"unexpected {self._describe()}", {"field", "method", "}"})
        self.end_of_line()
        return ClassDecl(name, tuple(fields), tuple(methods), self.path, self.loc(start))

    def parse_field(self) -> FieldDecl:
        start = self.expect("field")
        name = self.expect_ident().text
        self.expect(":=")
        lit = self.parse_unary()
        if not isinstance(lit, (IntLit, BoolLit)):
            raise self.error("field initial values must be literals", tok=start)
        self.end_of_line()
        return FieldDecl(name, lit.value, self.loc(start))

    def parse_method(self) -> MethodDecl:
        start = self.expect("method")
        name = self.expect_ident().text
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            params.append(self.expect_ident().text)
            while self.at(","):
                self.advance()
                params.append(self.expect_ident().text)
        self.expect(")")
        returns_value = False
        if self.at("returns"):
            self.advance()
            returns_value = True
        body = self.parse_block(in_test=False)
        self.end_of_line()
        return MethodDecl(name, tuple(params), body, returns_value, self.loc(start))

    def parse_suite(self) -> TestSuite:
        start = self.expect("suite")
        name = self.expect_ident().text
        self.expect("{")
        tests: list[TestCase] = []
        while True:
            self.skip_newlines()
            if self.at("}"):
                self.advance()
                break
            if not self.at("test"):
                raise self.error(f"unexpected {self._describe()}", {"test", "}"})
            tstart = self.advance()
            tname = self.expect_ident().text
            body = self.parse_block(in_test=True)
            self.end_of_line()
            tests.append(TestCase(tname, body, self.loc(tstart)))
        self.end_of_line()
        return TestSuite(name, tuple(tests), self.path, self.loc(start))

    # -- statements -------------------------------------------------------

    def parse_block(self, in_test: bool) -> tuple:
        self.expect("{")
        stmts = []
        while True:
            self.skip_newlines()
            if self.at("}"):
                self.advance()
                return tuple(stmts)
            if self.tok.kind == "eof":
                raise self.error("unexpected end of input", {"}"})
            stmts.append(self.parse_stmt(in_test))
            self.end_of_line()

    def parse_stmt(self, in_test: bool):
        start = self.tok
        loc = self.loc()
        if self.tok.kind == "ident" and self.tok.text in ASSERT_ARITY and self.peek().text == "(":
            if not in_test:
                raise self.error("assertions are only allowed in tests")
            return self.parse_assert()
        if self.at("if") or self.at("while") or self.at("return"):
            if in_test:
                raise self.error(f"'{start.text}' is not allowed in tests")
            if self.at("if"):
                return self.parse_if()
            if self.at("while"):
                self.advance()
                cond = self.parse_expr()
                return While(cond, self.parse_block(in_test), loc)
            self.advance()
            if self.tok.kind == "nl" or self.at("}"):
                return Return(None, loc)
            return Return(self.parse_expr(), loc)

        expr = self.parse_expr()
        if self.at(":="):
            op = self.advance()
            if isinstance(expr, Local):
                return Bind(expr.name, self.parse_expr(), loc)
            if isinstance(expr, FieldRead):
                if in_test:
                    raise self.error("tests cannot assign fields", tok=start)
                return FieldAssign(expr.name, self.parse_expr(), loc)
            raise self.error("invalid assignment target", tok=op)
        if not isinstance(expr, Call):
            raise self.error("expression statements must be invocations", tok=start)
        return ExprStmt(expr, loc)

    def parse_if(self) -> If:
        loc = self.loc()
        self.expect("if")
        cond = self.parse_expr()
        then = self.parse_block(in_test=False)
        orelse: tuple = ()
        if self.at("else"):
            self.advance()
            orelse = self.parse_block(in_test=False)
        return If(cond, then, orelse, loc)

    def parse_assert(self) -> Assert:
        start = self.advance()
        self.expect("(")
        args = self.parse_args()
        arity = ASSERT_ARITY[start.text]
        if len(args) != arity:
            raise MiniLangSyntaxError(
                self.path, start.line, start.col,
                f"{start.text} takes {arity} argument{'s' if arity > 1 else ''}, got {len(args)}",
            )
        return Assert(start.text, args, self.loc(start))

    # -- expressions ------------------------------------------------------

    def parse_args(self) -> tuple:
        """Parse a comma-separated list up to and including the closing paren."""
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.at(","):
                self.advance()
                args.append(self.parse_expr())
        self.expect(")")
        return tuple(args)

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.at("or"):
            tok = self.advance()
            left = BinOp("or", left, self.parse_and(), self.loc(tok))
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at("and"):
            tok = self.advance()
            left = BinOp("and", left, self.parse_not(), self.loc(tok))
        return left

    def parse_not(self):
        if self.at("not"):
            tok = self.advance()
            return Not(self.parse_not(), self.loc(tok))
        return self.parse_rel()

    def parse_rel(self):
        left = self.parse_add()
        if self.tok.kind == "sym" and self.tok.text in _REL:
            tok = self.advance()
            left = BinOp(tok.text, left, self.parse_add(), self.loc(tok))
            if self.tok.kind == "sym" and self.tok.text in _REL:
                raise self.error("comparison operators do not chain; add parentheses")
        return left

    def parse_add(self):
        left = self.parse_mul()
        while self.tok.kind == "sym" and self.tok.text in ("+", "-"):
            tok = self.advance()
            left = BinOp(tok.text, left, self.parse_mul(), self.loc(tok))
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.tok.kind == "sym" and self.tok.text in ("*", "/", "%"):
            tok = self.advance()
            left = BinOp(tok.text, left, self.parse_unary(), self.loc(tok))
        return left

    def parse_unary(self):
        # only literals may be negated; there is no unary minus operator
        if self.at("-"):
            tok = self.advance()
            if self.tok.kind != "int":
                raise self.error(f"unexpected {self._describe()}", {"integer literal"})
            return self._int_literal(self.advance(), negative=True, start=tok)
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while self.at("."):
            self.advance()
            name_tok = self.expect_ident()
            self.expect("(")
            expr = Call(expr, name_tok.text, self.parse_args(), None, self.loc(name_tok))
        return expr

    def parse_primary(self):
        tok = self.tok
        loc = self.loc()
        if tok.kind == "int":
            return self._int_literal(self.advance())
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(tok.text == "true", loc)
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                raise self.error("invocations need an explicit receiver", tok=tok)
            return Local(tok.text, loc)
        if self.at("self"):
            self.advance()
            self.expect(".")
            name_tok = self.expect_ident()
            if self.at("("):
                self.advance()
                return Call(SelfRef(loc), name_tok.text, self.parse_args(), None, self.loc(name_tok))
            return FieldRead(name_tok.text, loc)
        if self.at("new"):
            self.advance()
            cls = self.expect_ident().text
            self.expect("(")
            return New(cls, self.parse_args(), loc)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.error(
            f"unexpected {self._describe()}",
            {"integer literal", "true", "false", "identifier", "self", "new", "("},
        )

    def _int_literal(self, tok: Token, negative: bool = False, start: Token | None = None) -> IntLit:
        value = -int(tok.text) if negative else int(tok.text)
        if not INT_MIN <= value <= INT_MAX:
            raise self.error("integer literal out of 64-bit range", tok=start or tok)
        return IntLit(value, self.loc(start or tok))


def parse_source(text: str, path: str = "<input>") -> tuple[list[ClassDecl], list[TestSuite]]:
    return Parser(text, path).parse_file()


def parse_program(source_tree: Mapping[str, str]) -> Program:
    """Parse and resolve a project given as ``{relative path: text}``.

    Paths under ``src/`` hold production classes, paths under ``tests/`` hold
    test suites. Files are processed in lexicographic path order.
    """
    from mutagoal.frontend.resolve import resolve

    classes: list[ClassDecl] = []
    suites: list[TestSuite] = []
    for path in sorted(source_tree):
        file_classes, file_suites = parse_source(source_tree[path], path)
        if path.startswith(PRODUCTION_DIR):
            if file_suites:
                s = file_suites[0]
                raise MiniLangSyntaxError(path, s.loc.line, s.loc.col,
                                          "test suites belong under tests/")
            classes.extend(file_classes)
        elif path.startswith(TEST_DIR):
            if file_classes:
                c = file_classes[0]
                raise MiniLangSyntaxError(path, c.loc.line, c.loc.col,
                                          "production classes belong under src/")
            suites.extend(file_suites)
        else:
            raise MiniLangSyntaxError(path, 1, 1, "source files must live under src/ or tests/")

    lints = _check_declarations(classes, suites)
    return resolve(Program(tuple(classes), tuple(suites), tuple(lints)))


def _dupe(kind: str, name: str, loc: Loc) -> DuplicateDeclarationError:
    return DuplicateDeclarationError(f"{loc}: duplicate {kind} '{name}'")


def _check_declarations(classes: list[ClassDecl], suites: list[TestSuite]) -> list[str]:
    lints: list[str] = []
    seen: set[str] = set()
    for cls in classes:
        if cls.name in seen:
            raise _dupe("class", cls.name, cls.loc)
        seen.add(cls.name)
        names: set[str] = set()
        for f in cls.fields:
            if f.name in names:
                raise _dupe("field", f"{cls.name}.{f.name}", f.loc)
            names.add(f.name)
        names = set()
        for m in cls.methods:
            if m.name in names:
                raise _dupe("method", f"{cls.name}.{m.name}", m.loc)
            names.add(m.name)
            if len(set(m.params)) != len(m.params):
                raise _dupe("parameter", f"{cls.name}.{m.name}", m.loc)

    seen = set()
    for suite in suites:
        if suite.name in seen:
            raise _dupe("suite", suite.name, suite.loc)
        seen.add(suite.name)
        if not suite.name.endswith("Test"):
            raise MiniLangSyntaxError(suite.path, suite.loc.line, suite.loc.col,
                                      f"suite name '{suite.name}' must end with 'Test'")
        names = set()
        for test in suite.tests:
            if test.name in names:
                raise _dupe("test", f"{suite.name}.{test.name}", test.loc)
            names.add(test.name)
            if not test.body:
                raise MiniLangSyntaxError(suite.path, test.loc.line, test.loc.col,
                                          f"test '{suite.name}.{test.name}' has an empty body")
            if not any(isinstance(s, Assert) for s in test.body):
                lints.append(f"{test.loc}: test '{suite.name}.{test.name}' has no assertion")
    return lints
