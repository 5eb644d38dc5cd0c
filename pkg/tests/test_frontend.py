from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import program_from
from mutagoal.corpus import corpus_dir
from mutagoal.errors import DuplicateDeclarationError, MiniLangSyntaxError, ResolutionError
from mutagoal.frontend import load_project, parse_program, parse_source, pretty_print, render_tree
from mutagoal.frontend.lexer import tokenize
from mutagoal.frontend.nodes import (
    BinOp,
    BoolLit,
    Call,
    ClassDecl,
    FieldDecl,
    FieldRead,
    IntLit,
    Local,
    MethodDecl,
    New,
    Not,
    Program,
    Return,
    SelfRef,
    node_at,
    replace_at,
    walk,
)
from mutagoal.interp import INT_MAX, INT_MIN

POINT = """\
class Point {
    field x := 0
    field y := 0

    method moveBy(dx, dy) {
        self.x := self.x + dx
        self.y := self.y + dy
    }

    method getX() returns {
        return self.x
    }
}
"""


def test_parses_bank_account_structure(bank):
    (account,) = bank.classes
    assert account.name == "Account"
    assert account.field_names == ("balance", "pin", "authenticated")
    assert [m.name for m in account.methods] == ["authenticate", "deposit", "withdraw", "getBalance"]
    assert [m.returns_value for m in account.methods] == [False, False, True, True]
    assert bank.test_ids == ["AccountTest.testWithdraw"]


def test_locations_point_at_source(bank):
    withdraw = bank.class_table["Account"].method_table["withdraw"]
    assert withdraw.loc.path == "src/account.mini"
    assert withdraw.loc.line == 17
    assert withdraw.body[0].loc.line == 18


def test_pretty_print_round_trips_bundled_corpora():
    for name in ("bank-account", "eager-test", "uncovered-helper", "synthetic"):
        program = load_project(corpus_dir(name))
        assert parse_program(render_tree(program)) == program


def test_pretty_print_is_canonical(bank):
    text = render_tree(bank)["src/account.mini"]
    again = render_tree(parse_program(render_tree(bank)))["src/account.mini"]
    assert text == again
    assert "    method withdraw(n) returns {" in text


def test_empty_class_prints_on_one_line():
    program = program_from("class Empty { }\n")
    assert pretty_print(program.classes[0]) == "class Empty { }\n"


def test_call_targets_resolved_from_static_classes():
    program = program_from(POINT, """\
        suite PointTest {
            test testMove {
                p := new Point()
                p.moveBy(1, 2)
                assertEqual(p.getX(), 1)
            }
        }
    """)
    calls = [n for _, n in walk(program) if isinstance(n, Call)]
    assert {c.target for c in calls} == {"Point"}


def test_ambiguous_call_target_left_open():
    program = program_from("""\
        class A {
            method run() {
                return
            }
            method go(o) {
                o.run()
            }
        }
        class B {
            method run() {
                return
            }
        }
    """)
    go = program.class_table["A"].method_table["go"]
    assert go.body[0].expr.target is None


@pytest.mark.parametrize("source, message", [
    ("class A {\n    method m() {\n        x := y\n    }\n}\n", "unbound local 'y'"),
    ("class A {\n    method m() {\n        self.nope := 1\n    }\n}\n", "no field 'nope'"),
    ("class A {\n    method m() {\n        x := new Missing()\n    }\n}\n", "unknown class 'Missing'"),
    ("class A {\n    field f := 0\n    method m() {\n        x := new A(1, 2)\n    }\n}\n", "at most 1 arguments"),
    ("class A {\n    method m(p) {\n        self.m()\n    }\n}\n", "takes 1 arguments, got 0"),
    ("class A {\n    method m() {\n        x := new A()\n        x.zap()\n    }\n}\n", "no method 'zap'"),
])
def test_resolution_errors(source, message):
    with pytest.raises(ResolutionError, match=message):
        program_from(source)


@pytest.mark.parametrize("source, line, col", [
    ("class A {\n    field f := 1 +\n}\n", 2, 18),
    ("class A {\n    method m() {\n        x := 1 < 2 < 3\n    }\n}\n", 3, 20),
    ("class A {\n    method m() {\n        assertTrue(true)\n    }\n}\n", 3, 9),
    ("class A {\n    method m() {\n        x := @\n    }\n}\n", 3, 14),
    ("suite ATest {\n    test t {\n        assertEqual(1)\n    }\n}\n", 3, 9),
])
def test_syntax_errors_carry_locations(source, line, col):
    with pytest.raises(MiniLangSyntaxError) as info:
        parse_source(source, "src/a.mini")
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"src/a.mini:{line}:{col}:")


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(MiniLangSyntaxError) as info:
        parse_source("class A {\n    bogus\n}\n", "src/a.mini")
    assert info.value.expected == {"field", "method", "}"}


def test_expression_statement_must_be_invocation():
    with pytest.raises(MiniLangSyntaxError, match="invocations"):
        parse_source("class A {\n    method m() {\n        1 + 2\n    }\n}\n")


def test_tests_cannot_branch():
    with pytest.raises(MiniLangSyntaxError, match="not allowed in tests"):
        parse_source("suite ATest {\n    test t {\n        if true {\n        }\n    }\n}\n")


def test_integer_literal_range():
    program_from(f"class A {{\n    field f := {INT_MAX}\n    field g := {INT_MIN}\n}}\n")
    with pytest.raises(MiniLangSyntaxError, match="64-bit"):
        program_from(f"class A {{\n    field f := {INT_MAX + 1}\n}}\n")


def test_duplicates_rejected():
    with pytest.raises(DuplicateDeclarationError, match="class"):
        parse_program({"src/a.mini": "class A { }\n", "src/b.mini": "class A { }\n"})
    with pytest.raises(DuplicateDeclarationError, match="method"):
        program_from("class A {\n    method m() {\n        return\n    }\n"
                     "    method m() {\n        return\n    }\n}\n")


def test_suite_name_must_end_in_test():
    with pytest.raises(MiniLangSyntaxError, match="Test"):
        parse_program({"src/a.mini": "class A { }\n",
                       "tests/a.mini": "suite Checks {\n    test t {\n        assertTrue(true)\n    }\n}\n"})


def test_test_without_assertion_is_linted_not_rejected():
    program = program_from(POINT, """\
        suite PointTest {
            test testNothing {
                p := new Point()
            }
        }
    """)
    assert len(program.lints) == 1
    assert "has no assertion" in program.lints[0]


def test_files_outside_src_and_tests_rejected():
    with pytest.raises(MiniLangSyntaxError):
        parse_program({"lib/a.mini": "class A { }\n"})


def test_lexer_tracks_columns():
    tokens = tokenize("x := 12 # note\n")
    assert [(t.kind, t.text, t.col) for t in tokens[:3]] == [
        ("ident", "x", 1), ("sym", ":=", 3), ("int", "12", 6),
    ]


def test_replace_at_shares_untouched_subtrees(bank):
    addr, lit = next((a, n) for a, n in walk(bank) if isinstance(n, IntLit))
    changed = replace_at(bank, addr, IntLit(lit.value + 1))
    assert node_at(changed, addr) == IntLit(lit.value + 1)
    assert changed.suites is bank.suites
    assert node_at(bank, addr) == lit


# -- generated round trips ---------------------------------------------------

LEAVES = st.one_of(
    st.integers(INT_MIN, INT_MAX).map(IntLit),
    st.booleans().map(BoolLit),
    st.sampled_from(["a", "b"]).map(Local),
    st.sampled_from(["f", "g"]).map(FieldRead),
)


def _extend(children):
    binary = st.builds(
        BinOp,
        st.sampled_from(["+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "and", "or"]),
        children, children,
    )
    calls = st.builds(
        lambda recv, args: Call(recv, "m", tuple(args)),
        st.one_of(st.just(SelfRef()), st.sampled_from(["a", "b"]).map(Local), children),
        st.lists(children, min_size=2, max_size=2),
    )
    news = st.builds(lambda args: New("C", tuple(args)), st.lists(children, max_size=2))
    return st.one_of(binary, st.builds(Not, children), calls, news)


EXPRESSIONS = st.recursive(LEAVES, _extend, max_leaves=12)


def _program(expr) -> Program:
    method = MethodDecl("m", ("a", "b"), (Return(expr),), returns_value=True)
    cls = ClassDecl("C", (FieldDecl("f", 0), FieldDecl("g", False)), (method,), path="src/c.mini")
    return Program((cls,), ())


@settings(max_examples=300, deadline=None)
@given(EXPRESSIONS)
def test_print_then_parse_is_identity(expr):
    program = _program(expr)
    reparsed = parse_program(render_tree(program))
    assert reparsed == program


@settings(max_examples=100, deadline=None)
@given(EXPRESSIONS)
def test_printing_is_idempotent(expr):
    text = render_tree(_program(expr))
    assert render_tree(parse_program(text)) == text
