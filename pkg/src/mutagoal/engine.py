"""Mutation campaign orchestration.

The pipeline is: verify the unmutated program passes every test, generate
mutants, run each mutant against its selected tests (stopping at the first
failure), and store one result record per mutant. :func:`build_kill_matrix`
runs every test against every mutant instead and serves as ground truth.

Parallelism is across mutants only. Workers share the immutable program and
results are always returned in mutant order.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from mutagoal.errors import MutagoalError, StaleMutantError
from mutagoal.focal import FocalIndex, build_index
from mutagoal.frontend.nodes import Program
from mutagoal.interp import CostModel, TestOutcome, run_suite
from mutagoal.mutantgen import Mutant, materialize, program_digest
from mutagoal.selection import FOCAL, SelectionStrategy, select

KILLED = "killed"
SURVIVED = "survived"
NOT_COVERED = "not-covered"
ERROR = "error"


class PrecheckFailed(MutagoalError):
    def __init__(self, failures: list[TestOutcome]):
        self.failures = failures
        super().__init__("unmutated program fails: " + ", ".join(o.test_id for o in failures))


@dataclass(frozen=True)
class MutantResult:
    mutant_id: str
    strategy: str
    status: str
    class_name: str
    method_name: str
    focal_located: bool
    tests_considered: int
    tests_executed: int
    cost_steps: int
    killed_by: Optional[str] = None
    kill_position: Optional[int] = None
    kill_verdict: Optional[str] = None
    selection: tuple[str, ...] = ()
    error: Optional[str] = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def killed(self) -> bool:
        return self.status == KILLED

    @property
    def method_ref(self) -> str:
        return f"{self.class_name}.{self.method_name}"

    def to_record(self, with_wall: bool = False) -> dict:
        record = {
            "mutant": self.mutant_id,
            "strategy": self.strategy,
            "status": self.status,
            "class": self.class_name,
            "method": self.method_name,
            "focal_located": self.focal_located,
            "tests_considered": self.tests_considered,
            "tests_executed": self.tests_executed,
            "cost_steps": self.cost_steps,
            "killed_by": self.killed_by,
            "kill_position": self.kill_position,
            "kill_verdict": self.kill_verdict,
            "selection": list(self.selection),
        }
        if self.error is not None:
            record["error"] = self.error
        if with_wall:
            record["wall_time"] = self.wall_time
        return record

    @classmethod
    def from_record(cls, r: dict) -> "MutantResult":
        return cls(
            mutant_id=r["mutant"], strategy=r["strategy"], status=r["status"],
            class_name=r["class"], method_name=r["method"], focal_located=r["focal_located"],
            tests_considered=r["tests_considered"], tests_executed=r["tests_executed"],
            cost_steps=r["cost_steps"], killed_by=r.get("killed_by"),
            kill_position=r.get("kill_position"), kill_verdict=r.get("kill_verdict"),
            selection=tuple(r.get("selection", ())), error=r.get("error"),
            wall_time=r.get("wall_time", 0.0),
        )


# -- pre-phase ---------------------------------------------------------------


def precheck(program: Program, cost: CostModel = CostModel()) -> list[TestOutcome]:
    """Run every test on the unmutated program; return the failing outcomes."""
    return [o for o in run_suite(program, program.test_ids, cost) if not o.passed]


# -- phase B -----------------------------------------------------------------

# per-process state, installed once per worker to avoid re-pickling the program
_STATE: dict = {}


def _install(program, mutants, strategy, cost, index):
    _STATE.update(program=program, mutants=mutants, strategy=strategy, cost=cost, index=index)


def _evaluate(i: int) -> MutantResult:
    s = _STATE
    return evaluate_mutant(s["program"], s["mutants"][i], s["strategy"], s["cost"], s["index"])


def evaluate_mutant(program: Program, mutant: Mutant, strategy: str, cost: CostModel,
                    index: FocalIndex) -> MutantResult:
    focal_located = index.is_focal(mutant.method_ref)
    base = dict(mutant_id=mutant.id, strategy=strategy, class_name=mutant.class_name,
                method_name=mutant.method_name, focal_located=focal_located)
    started = time.perf_counter()
    selection = select(mutant, program, index, strategy)
    if strategy == FOCAL and not selection.has_focal_tests:
        return MutantResult(status=NOT_COVERED, tests_considered=0, tests_executed=0,
                            cost_steps=0, **base)
    try:
        mutated = materialize(program, mutant)
    except StaleMutantError as exc:
        return MutantResult(status=ERROR, tests_considered=len(selection.tests), tests_executed=0,
                            cost_steps=0, selection=selection.tests, error=str(exc), **base)
    outcomes = run_suite(mutated, selection.tests, cost, early_stop=True)
    steps = sum(o.steps_executed for o in outcomes)
    elapsed = time.perf_counter() - started
    if outcomes and not outcomes[-1].passed:
        last = outcomes[-1]
        return MutantResult(status=KILLED, tests_considered=len(selection.tests),
                            tests_executed=len(outcomes), cost_steps=steps,
                            killed_by=last.test_id, kill_position=len(outcomes),
                            kill_verdict=last.verdict.kind, selection=selection.tests,
                            wall_time=elapsed, **base)
    return MutantResult(status=SURVIVED, tests_considered=len(selection.tests),
                        tests_executed=len(outcomes), cost_steps=steps,
                        selection=selection.tests, wall_time=elapsed, **base)


def _pool_map(fn, n: int, parallelism: int, initargs: tuple):
    """Yield ``fn(i)`` for ``i in range(n)`` in order, optionally in worker processes."""
    if parallelism <= 1 or n <= 1:
        _install(*initargs)
        try:
            for i in range(n):
                yield fn(i)
        finally:
            _STATE.clear()
        return
    ctx = multiprocessing.get_context("fork") if "fork" in multiprocessing.get_all_start_methods() else None
    chunk = max(1, n // (parallelism * 4))
    with ProcessPoolExecutor(max_workers=parallelism, mp_context=ctx,
                             initializer=_install, initargs=initargs) as pool:
        yield from pool.map(fn, range(n), chunksize=chunk)


def run_campaign(program: Program, mutants: Sequence[Mutant], strategy: SelectionStrategy | str,
                 cost: CostModel = CostModel(), parallelism: int = 1,
                 index: FocalIndex | None = None,
                 done: dict[str, MutantResult] | None = None,
                 sink: Callable[[MutantResult], None] | None = None) -> list[MutantResult]:
    """Execute every mutant under one selection strategy.

    ``done`` holds results recovered from an interrupted run; those mutants
    are not re-executed. ``sink`` sees each new result as soon as it is
    available, in mutant order.
    """
    kind = strategy.kind if isinstance(strategy, SelectionStrategy) else SelectionStrategy(strategy).kind
    if index is None:
        index = build_index(program)
    done = done or {}
    pending = [m for m in mutants if m.id not in done]
    fresh = _pool_map(_evaluate, len(pending), parallelism, (program, pending, kind, cost, index))
    by_id = dict(done)
    for result in fresh:
        by_id[result.mutant_id] = result
        if sink is not None:
            sink(result)
    return [by_id[m.id] for m in mutants]


# -- kill matrix ---------------------------------------------------------------


@dataclass(frozen=True)
class KillMatrix:
    mutant_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    kills: tuple[tuple[bool, ...], ...]
    steps: tuple[tuple[int, ...], ...]

    def row(self, mutant_id: str) -> dict[str, bool]:
        i = self._rows[mutant_id]
        return dict(zip(self.test_ids, self.kills[i]))

    @property
    def _rows(self) -> dict[str, int]:
        rows = self.__dict__.get("_row_index")
        if rows is None:
            rows = {m: i for i, m in enumerate(self.mutant_ids)}
            self.__dict__["_row_index"] = rows
        return rows

    def killers(self, mutant_id: str) -> set[str]:
        return {t for t, k in self.row(mutant_id).items() if k}

    def status_for(self, mutant_id: str, selection: Iterable[str]) -> tuple[str, Optional[str]]:
        """Status a campaign must report when running ``selection`` in order."""
        selection = list(selection)
        if not selection:
            return SURVIVED, None
        row = self.row(mutant_id)
        for tid in selection:
            if row[tid]:
                return KILLED, tid
        return SURVIVED, None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["mutant", *self.test_ids])
        for mid, kills, steps in zip(self.mutant_ids, self.kills, self.steps):
            writer.writerow([mid, *(f"{'K' if k else 'P'}:{s}" for k, s in zip(kills, steps))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "KillMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        mids, kills, steps = [], [], []
        for row in body:
            mids.append(row[0])
            cells = [c.split(":", 1) for c in row[1:]]
            kills.append(tuple(k == "K" for k, _ in cells))
            steps.append(tuple(int(s) for _, s in cells))
        return cls(tuple(mids), tuple(header[1:]), tuple(kills), tuple(steps))


def _matrix_row(i: int):
    s = _STATE
    mutated = materialize(s["program"], s["mutants"][i])
    outcomes = run_suite(mutated, s["program"].test_ids, s["cost"], early_stop=False)
    return tuple(not o.passed for o in outcomes), tuple(o.steps_executed for o in outcomes)


def build_kill_matrix(program: Program, mutants: Sequence[Mutant], cost: CostModel = CostModel(),
                      parallelism: int = 1) -> KillMatrix:
    rows = list(_pool_map(_matrix_row, len(mutants), parallelism,
                          (program, list(mutants), None, cost, None)))
    return KillMatrix(
        tuple(m.id for m in mutants),
        tuple(program.test_ids),
        tuple(r[0] for r in rows),
        tuple(r[1] for r in rows),
    )


# -- persistence ---------------------------------------------------------------


def results_path(out_dir: Path, strategy: str) -> Path:
    return Path(out_dir) / f"results-{strategy}.jsonl"


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def campaign_meta(program: Program, strategy: str, ops: Iterable[str], cost: CostModel) -> dict:
    return {
        "kind": "meta",
        "strategy": strategy,
        "program": program_digest(program),
        "ops": sorted(ops),
        "budget": cost.budget,
        "mode": cost.mode,
    }


def load_results(path: Path) -> tuple[Optional[dict], list[MutantResult]]:
    """Read a results stream, ignoring a torn final line from an interrupted write."""
    if not path.exists():
        return None, []
    meta = None
    results = []
    for line in path.read_text(encoding="utf-8").splitlines():
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            break
        if record.get("kind") == "meta":
            meta = record
        else:
            results.append(MutantResult.from_record(record))
    return meta, results


class ResultStore:
    """Append-only record stream for one strategy; supports resuming."""

    def __init__(self, path: Path, meta: dict, with_wall: bool = False):
        self.path = Path(path)
        self.meta = meta
        self.with_wall = with_wall
        old_meta, old = load_results(self.path)
        if old_meta == meta:
            self.done = {r.mutant_id: r for r in old}
        else:
            self.done = {}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        # rewrite the valid prefix so a torn tail never survives a resume
        with self.path.open("w", encoding="utf-8") as fh:
            fh.write(_dump(meta) + "\n")
            for r in self.done.values():
                fh.write(_dump(r.to_record(self.with_wall)) + "\n")
        self._fh = None

    def __enter__(self):
        self._fh = self.path.open("a", encoding="utf-8")
        return self

    def __exit__(self, *exc):
        self._fh.close()

    def append(self, result: MutantResult) -> None:
        self._fh.write(_dump(result.to_record(self.with_wall)) + "\n")
        self._fh.flush()


def mutation_testing(program: Program, mutants: Sequence[Mutant], strategy: str,
                     cost: CostModel, parallelism: int, out_dir: Path,
                     ops: Iterable[str], index: FocalIndex | None = None) -> list[MutantResult]:
    """Pre-phase check, then phase B with incremental persistence."""
    failures = precheck(program, cost)
    if failures:
        raise PrecheckFailed(failures)
    index = index or build_index(program)
    meta = campaign_meta(program, strategy, ops, cost)
    store = ResultStore(results_path(out_dir, strategy), meta, with_wall=cost.mode == "wall")
    with store:
        return run_campaign(program, mutants, strategy, cost, parallelism, index,
                            done=store.done, sink=store.append)


def write_matrix(matrix: KillMatrix, out_dir: Path) -> Path:
    path = Path(out_dir) / "matrix.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(matrix.to_csv(), encoding="utf-8")
    return path


__all__ = [
    "KillMatrix", "MutantResult", "PrecheckFailed", "ResultStore",
    "build_kill_matrix", "evaluate_mutant", "load_results", "mutation_testing",
    "precheck", "run_campaign", "write_matrix",
]
