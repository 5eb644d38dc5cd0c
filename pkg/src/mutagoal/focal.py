"""Static focal-method detection for MiniLang unit tests.

A test is split into sub-scenarios, each ending in a maximal run of
assertions (the oracle). For every object the oracle observes, the focal
method is the last state-changing (mutator) invocation on that object before
the oracle. The union over all sub-scenarios gives the test's focal set; the
inverse of that relation gives, per production method, the tests responsible
for it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from mutagoal.frontend.nodes import (
    Assert,
    Bind,
    Call,
    FieldAssign,
    Local,
    Program,
    SelfRef,
    TestCase,
    children,
    walk,
)

MUTATOR = "mutator"
INSPECTOR = "inspector"


@dataclass(frozen=True)
class MethodKind:
    cls: str
    method: str
    kind: str

    @property
    def ref(self) -> str:
        return f"{self.cls}.{self.method}"


@dataclass(frozen=True)
class SubScenario:
    pre: tuple  # statements leading up to the oracle
    oracle: tuple  # the assertions closing the sub-scenario
    start: int  # index of the first statement within the test body

    def lines(self) -> dict:
        def span(stmts):
            return [stmts[0].loc.line, stmts[-1].loc.line] if stmts else None
        return {"pre_oracle": span(self.pre), "oracle": span(self.oracle)}


def _calls(node) -> Iterator[Call]:
    """Invocations inside ``node`` in evaluation order (receiver, args, call)."""
    for _, child in children(node):
        yield from _calls(child)
    if isinstance(node, Call):
        yield node


def classify_methods(program: Program) -> list[MethodKind]:
    """Label every method mutator or inspector.

    A method is a mutator when it assigns a field of ``self`` or invokes a
    mutator on ``self``; the second clause is closed by least fixpoint.
    """
    writes: dict[str, bool] = {}
    self_calls: dict[str, set[str]] = {}
    for cls in program.classes:
        for m in cls.methods:
            ref = f"{cls.name}.{m.name}"
            nodes = [n for _, n in walk(m)]
            writes[ref] = any(isinstance(n, FieldAssign) for n in nodes)
            self_calls[ref] = {
                f"{cls.name}.{n.method}" for n in nodes
                if isinstance(n, Call) and isinstance(n.receiver, SelfRef)
            }
    mutators = {ref for ref, w in writes.items() if w}
    changed = True
    while changed:
        changed = False
        for ref, callees in self_calls.items():
            if ref not in mutators and callees & mutators:
                mutators.add(ref)
                changed = True
    return [
        MethodKind(cls.name, m.name, MUTATOR if f"{cls.name}.{m.name}" in mutators else INSPECTOR)
        for cls in program.classes for m in cls.methods
    ]


def segment(test: TestCase) -> list[SubScenario]:
    """Split a test body into sub-scenarios.

    Statements after the last assertion belong to no sub-scenario; see
    :func:`trailing_statements`.
    """
    scenarios: list[SubScenario] = []
    body = test.body
    start = i = 0
    n = len(body)
    while i < n:
        if isinstance(body[i], Assert):
            j = i
            while j < n and isinstance(body[j], Assert):
                j += 1
            scenarios.append(SubScenario(tuple(body[start:i]), tuple(body[i:j]), start))
            start = i = j
        else:
            i += 1
    return scenarios


def trailing_statements(test: TestCase) -> int:
    count = 0
    for stmt in reversed(test.body):
        if isinstance(stmt, Assert):
            break
        count += 1
    # a test without any assertion has no oracle at all; report it as such
    return count if any(isinstance(s, Assert) for s in test.body) else 0


@dataclass
class _Binding:
    token: int
    # (method ref, receiver token) when bound from an invocation result
    origin: Optional[tuple[str, Optional[int]]] = None


def extract_focal(test: TestCase, kinds: dict[str, str]) -> set[str]:
    """Focal methods (``Class.method`` refs) of one test.

    ``kinds`` maps method refs to ``"mutator"`` / ``"inspector"``.
    """
    bindings: dict[str, _Binding] = {}
    tokens = itertools.count(1)
    focal: set[str] = set()

    def ref_of(call: Call) -> Optional[str]:
        if call.target is None:
            return None
        return f"{call.target}.{call.method}"

    def receiver_token(call: Call) -> Optional[int]:
        recv = call.receiver
        if isinstance(recv, Local) and recv.name in bindings:
            return bindings[recv.name].token
        return None

    def track_mutators(node, last_mut: dict[int, str]) -> None:
        for call in _calls(node):
            ref = ref_of(call)
            tok = receiver_token(call)
            if ref is not None and tok is not None and kinds.get(ref) == MUTATOR:
                last_mut[tok] = ref

    for sub in segment(test):
        last_mut: dict[int, str] = {}
        for stmt in sub.pre:
            track_mutators(stmt, last_mut)
            if isinstance(stmt, Bind):
                origin = None
                if isinstance(stmt.value, Call):
                    ref = ref_of(stmt.value)
                    if ref is not None:
                        origin = (ref, receiver_token(stmt.value))
                bindings[stmt.name] = _Binding(next(tokens), origin)

        # invocations nested in assertions run just before the comparison
        for stmt in sub.oracle:
            track_mutators(stmt, last_mut)

        observed: set[int] = set()
        for stmt in sub.oracle:
            for _, node in walk(stmt):
                if isinstance(node, Local) and node.name in bindings:
                    binding = bindings[node.name]
                    observed.add(binding.token)
                    if binding.origin is not None:
                        ref, recv_tok = binding.origin
                        if kinds.get(ref) == MUTATOR:
                            focal.add(ref)
                        elif recv_tok is not None:
                            # value read through an inspector observes its receiver
                            observed.add(recv_tok)
                elif isinstance(node, Call):
                    ref = ref_of(node)
                    tok = receiver_token(node)
                    if tok is not None and ref is not None and kinds.get(ref) == INSPECTOR:
                        observed.add(tok)
        for tok in observed:
            if tok in last_mut:
                focal.add(last_mut[tok])
    return focal


@dataclass(frozen=True)
class FocalIndex:
    focal: dict[str, tuple[str, ...]]  # test id -> sorted focal method refs
    tests_of: dict[str, tuple[str, ...]]  # method ref -> test ids in global order
    kinds: dict[str, str]  # method ref -> mutator | inspector
    scenarios: dict[str, tuple[SubScenario, ...]] = field(default_factory=dict)
    lints: tuple[str, ...] = ()

    def tests_for(self, method_ref: str) -> tuple[str, ...]:
        return self.tests_of.get(method_ref, ())

    def is_focal(self, method_ref: str) -> bool:
        return bool(self.tests_of.get(method_ref))

    def to_record(self) -> dict:
        return {
            "tests": [
                {
                    "test_id": tid,
                    "focal_methods": list(refs),
                    "sub_scenario_count": len(self.scenarios.get(tid, ())),
                }
                for tid, refs in self.focal.items()
            ],
            "methods": [
                {"method": ref, "kind": kind, "tests": list(self.tests_of.get(ref, ()))}
                for ref, kind in self.kinds.items()
            ],
            "lints": list(self.lints),
        }

    @classmethod
    def from_record(cls, record: dict) -> "FocalIndex":
        focal = {t["test_id"]: tuple(t["focal_methods"]) for t in record["tests"]}
        kinds = {m["method"]: m["kind"] for m in record["methods"]}
        tests_of = {m["method"]: tuple(m["tests"]) for m in record["methods"] if m["tests"]}
        return cls(focal, tests_of, kinds, {}, tuple(record.get("lints", ())))


def build_index(program: Program) -> FocalIndex:
    kinds = {k.ref: k.kind for k in classify_methods(program)}
    focal: dict[str, tuple[str, ...]] = {}
    scenarios: dict[str, tuple[SubScenario, ...]] = {}
    inverse: dict[str, list[str]] = {}
    lints: list[str] = []
    for tid, test in program.test_table.items():
        subs = tuple(segment(test))
        scenarios[tid] = subs
        if not subs:
            lints.append(f"{test.loc}: {tid} has no oracle; no focal methods can be derived")
        elif trailing_statements(test):
            lints.append(f"{test.loc}: {tid} has {trailing_statements(test)} statement(s) after its last assertion")
        refs = tuple(sorted(extract_focal(test, kinds)))
        focal[tid] = refs
        for ref in refs:
            inverse.setdefault(ref, []).append(tid)
    tests_of = {ref: tuple(inverse[ref]) for ref in kinds if ref in inverse}
    return FocalIndex(focal, tests_of, kinds, scenarios, tuple(lints))
