"""Test-scoping strategies: full suite, class-based, focal-method-based."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from mutagoal.focal import FocalIndex
from mutagoal.frontend.nodes import Program
from mutagoal.mutantgen import Mutant

FULL = "full"
CLASS = "class"
FOCAL = "focal"
STRATEGIES = (FULL, CLASS, FOCAL)

TECHNIQUE_NAMES = {FULL: "Full Test Suite", CLASS: "Class Based", FOCAL: "Focal Methods"}


@dataclass(frozen=True)
class SelectionStrategy:
    kind: str

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}; choose from {', '.join(STRATEGIES)}")


@dataclass(frozen=True)
class TestSelection:
    __test__ = False

    mutant_id: str
    strategy: str
    tests: tuple[str, ...]
    has_focal_tests: bool = True


def order_tests(tests: Iterable[str], program: Program) -> list[str]:
    """Suite file path (lexicographic), then declaration order within the file."""
    wanted = set(tests)
    missing = wanted - program.test_table.keys()
    if missing:
        raise KeyError(f"unknown tests: {', '.join(sorted(missing))}")
    # program.test_table is already in that order: files are parsed sorted
    return [tid for tid in program.test_table if tid in wanted]


def class_tests(program: Program, class_name: str) -> list[str]:
    suite_name = f"{class_name}Test"
    return [tid for suite, test in program.iter_tests() if suite.name == suite_name
            for tid in (f"{suite.name}.{test.name}",)]


def select(mutant: Mutant, program: Program, index: FocalIndex | None,
           strategy: SelectionStrategy | str) -> TestSelection:
    kind = strategy.kind if isinstance(strategy, SelectionStrategy) else SelectionStrategy(strategy).kind
    if kind == FULL:
        tests = program.test_ids
        has_focal = True
    elif kind == CLASS:
        tests = class_tests(program, mutant.class_name)
        has_focal = True
    else:
        if index is None:
            raise ValueError("the focal strategy needs a focal index")
        tests = order_tests(index.tests_for(mutant.method_ref), program)
        has_focal = bool(tests)
    return TestSelection(mutant.id, kind, tuple(tests), has_focal)
