"""Shared helpers for building programs and campaigns in tests."""

from __future__ import annotations

import textwrap
from collections import Counter
from pathlib import Path

from mutagoal.corpus import corpus_cost, load_corpus
from mutagoal.engine import build_kill_matrix, run_campaign
from mutagoal.focal import build_index
from mutagoal.frontend import parse_program, parse_source, read_tree, render_tree
from mutagoal.frontend.lexer import tokenize
from mutagoal.frontend.nodes import Program
from mutagoal.frontend.resolve import resolve
from mutagoal.interp import INT_MAX
from mutagoal.mutantgen import OPERATORS, generate_mutants
from mutagoal.selection import STRATEGIES


def program_from(src: str, tests: str = "", name: str = "main"):
    """Build a program from inline MiniLang text."""
    tree = {f"src/{name}.mini": textwrap.dedent(src)}
    if tests:
        tree[f"tests/{name}_test.mini"] = textwrap.dedent(tests)
    return parse_program(tree)


def write_project(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text), encoding="utf-8")
    return root


class Campaign:
    """Everything one exhaustive run over a corpus produces."""

    def __init__(self, name: str):
        self.name = name
        self.program, self.manifest = load_corpus(name)
        self.cost = corpus_cost(name)
        self.index = build_index(self.program)
        self.mutants = generate_mutants(self.program)
        self.matrix = build_kill_matrix(self.program, self.mutants, self.cost)
        self.results = {
            s: run_campaign(self.program, self.mutants, s, self.cost, 1, self.index)
            for s in STRATEGIES
        }


_campaigns: dict[str, Campaign] = {}


def campaign(name: str) -> Campaign:
    if name not in _campaigns:
        _campaigns[name] = Campaign(name)
    return _campaigns[name]


def result(mutant_id: str, strategy: str, status: str, cost: int, *, cls: str = "C",
           method: str = "m", focal: bool = True, considered: int = 1):
    """A hand-made result record for report arithmetic tests."""
    from mutagoal.engine import KILLED, NOT_COVERED, MutantResult

    tests = tuple(f"{cls}Test.t{i}" for i in range(considered))
    if status == NOT_COVERED:
        tests = ()
    killed = status == KILLED
    return MutantResult(
        mutant_id=mutant_id, strategy=strategy, status=status, class_name=cls,
        method_name=method, focal_located=focal, tests_considered=len(tests),
        tests_executed=1 if killed else len(tests), cost_steps=cost,
        killed_by=tests[0] if killed else None, kill_position=1 if killed else None,
        kill_verdict="assertion-failure" if killed else None, selection=tests,
    )


def reparse(program: Program, path: str) -> Program:
    """Print and re-parse the file at ``path``, then re-resolve everything.

    Only the mutated file changes, so the other classes are reused as-is;
    resolution still runs over the whole program.
    """
    classes, _ = parse_source(render_tree(program)[path], path)
    fresh = iter(classes)
    merged = tuple(next(fresh) if c.path == path else c for c in program.classes)
    return resolve(Program(merged, program.suites))


ARITH = {"+", "-", "*", "/", "%"}
REL = {"<", "<=", ">", ">=", "==", "!="}
# tokens after which a '-' can only be a sign
_SIGN_CONTEXT = ARITH | REL | {"(", ",", ":=", "and", "or", "not", "return"}


def token_site_counts(source: str) -> Counter:
    """Count mutation sites by scanning tokens of method bodies.

    Independent of the parser: it never builds a tree, it only tracks brace
    depth to skip field initializers and recognises signs by context.
    """
    counts = Counter({op: 0 for op in OPERATORS})
    tokens = tokenize(source)
    in_method = False
    depth = 0
    method_depth = None
    prev = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.text == "method":
            in_method = True
            method_depth = depth
        if tok.text == "{":
            depth += 1
        elif tok.text == "}":
            depth -= 1
            if in_method and depth == method_depth:
                in_method = False
        elif in_method and depth > method_depth:
            if tok.text in ("if", "while"):
                counts["CNB"] += 1
            elif tok.text in ("and", "or"):
                counts["LCR"] += 1
            elif tok.text in REL:
                counts["ROR"] += 1
            elif tok.text == "-" and (prev is None or prev.kind == "nl" or prev.text in _SIGN_CONTEXT):
                # a sign: fold it into the literal that follows
                value = -int(tokens[i + 1].text)
                counts["CRP"] += _crp_variants(value)
                prev = tokens[i + 1]
                i += 2
                continue
            elif tok.text in ARITH:
                counts["AOR"] += 1
            elif tok.kind == "int":
                counts["CRP"] += _crp_variants(int(tok.text))
        prev = tok
        i += 1
    return counts


def _crp_variants(c: int) -> int:
    return int(c + 1 <= INT_MAX) + int(c != 0 and c + 1 != 0)


def oracle_counts(project) -> dict[str, int]:
    total = Counter({op: 0 for op in OPERATORS})
    for path, text in read_tree(project).items():
        if path.startswith("src/"):
            total.update(token_site_counts(text))
    return dict(total)
