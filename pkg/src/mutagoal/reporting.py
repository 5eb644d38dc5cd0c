"""Campaign metrics and their table / JSON / CSV renderings.

The per-class table mirrors the classic focal-method results layout: for
each production class and each technique it lists how many of the mutants
located in focal methods were detected, the false negatives against the
full suite, the average number of tests considered, the run time, and the
speed-up over the full suite. All ratios are kept as exact fractions and
only rounded when rendered.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional

from mutagoal.engine import (
    ERROR,
    KILLED,
    NOT_COVERED,
    SURVIVED,
    KillMatrix,
    MutantResult,
    load_results,
    results_path,
)
from mutagoal.errors import MissingBaselineError
from mutagoal.focal import FocalIndex
from mutagoal.selection import FULL, STRATEGIES, TECHNIQUE_NAMES

TOTAL = "Total"
FORMATS = ("table", "json", "csv")

TABLE_HEADER = ("Class", "Technique", "Focal Mutants Detected", "False Negatives",
                "AVG Tests Considered", "Run Time", "Speed-up")
SUMMARY_HEADER = ("Technique", "Mutation Score", "Focal Coverage",
                  "Quality (vs full)", "Quality (vs focal-located)", "Speed-up (all mutants)")


@dataclass(frozen=True)
class ReportRow:
    group: str
    technique: str
    mutants: int
    focal_located: int
    focal_killed: int
    false_negatives: int
    avg_tests_considered: Optional[Fraction]
    avg_tests_executed: Optional[Fraction]
    run_time: int
    run_time_wall: Optional[float]
    speed_up: Optional[Fraction]
    killed_all: int
    mutation_score: Optional[Fraction]
    run_time_all: int
    speed_up_all: Optional[Fraction]
    quality_score_vs_full: Optional[Fraction]
    quality_score_vs_all: Optional[Fraction]
    focal_coverage: Optional[Fraction]


@dataclass(frozen=True)
class CampaignReport:
    cost_mode: str
    techniques: tuple[str, ...]
    rows: tuple[ReportRow, ...]

    def row(self, group: str, technique: str) -> ReportRow:
        for r in self.rows:
            if r.group == group and r.technique == technique:
                return r
        raise KeyError((group, technique))

    def total(self, technique: str) -> ReportRow:
        return self.row(TOTAL, technique)

    # -- lossless serialization ------------------------------------------

    def to_dict(self) -> dict:
        return {
            "cost_mode": self.cost_mode,
            "techniques": list(self.techniques),
            "rows": [{k: _encode(v) for k, v in asdict(r).items()} for r in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignReport":
        kinds = {f.name: f.type for f in fields(ReportRow)}
        rows = []
        for raw in data["rows"]:
            rows.append(ReportRow(**{k: _decode(v, kinds[k]) for k, v in raw.items()}))
        return cls(data["cost_mode"], tuple(data["techniques"]), tuple(rows))


def _encode(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return value


def _decode(value, annotation: str):
    if value is not None and "Fraction" in annotation:
        return Fraction(value)
    return value


def _ratio(num, den) -> Optional[Fraction]:
    if not den:
        return None
    return Fraction(num) / Fraction(den)


def _cost(r: MutantResult, mode: str):
    return Fraction(str(r.wall_time)) if mode == "wall" else r.cost_steps


def compute_report(results: Mapping[str, Iterable[MutantResult]],
                   matrix: KillMatrix | None = None,
                   index: FocalIndex | None = None,
                   cost_mode: str = "steps") -> CampaignReport:
    """Aggregate per-strategy results into per-class and total rows.

    The full-suite results are the baseline for false negatives and speed-up.
    A mutant counts as focal-located when its method is focal for at least
    one test (taken from ``index`` when given, else from the records).
    ``matrix`` is accepted for symmetry with :func:`verify_results`, which
    performs the matrix cross-checks.
    """
    if FULL not in results:
        raise MissingBaselineError("full-suite results are required as the baseline")
    del matrix
    techniques = tuple(s for s in STRATEGIES if s in results)
    by_strategy = {s: list(results[s]) for s in techniques}

    def located(r: MutantResult) -> bool:
        return index.is_focal(r.method_ref) if index is not None else r.focal_located

    baseline = {r.mutant_id: r for r in by_strategy[FULL]}
    groups = sorted({r.class_name for r in baseline.values()})
    rows: list[ReportRow] = []
    # an empty campaign yields no rows, so the table renders as headers only
    for group in [*groups, TOTAL] if baseline else []:
        def pick(rs):
            return [r for r in rs if group == TOTAL or r.class_name == group]

        full_all = pick(by_strategy[FULL])
        full_fl = [r for r in full_all if located(r)]
        full_fl_killed = {r.mutant_id for r in full_fl if r.killed}
        full_time_fl = sum(_cost(r, cost_mode) for r in full_fl)
        full_time_all = sum(_cost(r, cost_mode) for r in full_all)
        for tech in techniques:
            all_rs = pick(by_strategy[tech])
            fl = [r for r in all_rs if located(r)]
            killed_fl = {r.mutant_id for r in fl if r.killed}
            time_fl = sum(_cost(r, cost_mode) for r in fl)
            time_all = sum(_cost(r, cost_mode) for r in all_rs)
            wall_fl = sum(r.wall_time for r in fl) if cost_mode == "wall" else None
            if tech == FULL:
                speed, speed_all = None, None
            else:
                speed = _ratio(full_time_fl, time_fl) if fl else None
                speed_all = _ratio(full_time_all, time_all)
            rows.append(ReportRow(
                group=group,
                technique=tech,
                mutants=len(all_rs),
                focal_located=len(fl),
                focal_killed=len(killed_fl),
                false_negatives=len(full_fl_killed) - len(killed_fl & full_fl_killed),
                avg_tests_considered=_ratio(sum(r.tests_considered for r in fl), len(fl)),
                avg_tests_executed=_ratio(sum(r.tests_executed for r in fl), len(fl)),
                run_time=time_fl if cost_mode == "steps" else 0,
                run_time_wall=wall_fl,
                speed_up=speed,
                killed_all=sum(1 for r in all_rs if r.killed),
                mutation_score=_ratio(sum(1 for r in all_rs if r.killed), len(all_rs)),
                run_time_all=time_all if cost_mode == "steps" else 0,
                speed_up_all=speed_all,
                quality_score_vs_full=_ratio(len(killed_fl), len(full_fl_killed)),
                quality_score_vs_all=_ratio(len(killed_fl), len(fl)),
                focal_coverage=_ratio(len(fl), len(all_rs)),
            ))
    return CampaignReport(cost_mode, techniques, tuple(rows))


# -- rendering ---------------------------------------------------------------


def fmt_decimal(value: Optional[Fraction], places: int = 1) -> str:
    if value is None:
        return "N.A."
    q = Decimal(1).scaleb(-places)
    d = (Decimal(value.numerator) / Decimal(value.denominator)).quantize(q, rounding=ROUND_HALF_UP)
    return f"{d}"


def fmt_speed_up(value: Optional[Fraction]) -> str:
    return "N.A." if value is None else f"{fmt_decimal(value)}x"


def fmt_percent(value: Optional[Fraction]) -> str:
    return "N.A." if value is None else f"{fmt_decimal(value * 100, 0)}%"


def _grid(header: tuple, body: list[tuple]) -> list[str]:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *body)]

    def line(cells):
        return " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line(header), "-+-".join("-" * w for w in widths)]
    out += [line(r) for r in body]
    return out


def render_table(report: CampaignReport) -> str:
    body = []
    for r in report.rows:
        run_time = f"{r.run_time} steps" if report.cost_mode == "steps" else f"{r.run_time_wall:.3f} s"
        body.append((
            r.group if r.technique == report.techniques[0] else "",
            TECHNIQUE_NAMES[r.technique],
            f"{r.focal_killed} / {r.focal_located}",
            str(r.false_negatives),
            fmt_decimal(r.avg_tests_considered),
            run_time,
            fmt_speed_up(r.speed_up),
        ))
    lines = _grid(TABLE_HEADER, body)
    summary = [
        (TECHNIQUE_NAMES[r.technique], fmt_percent(r.mutation_score), fmt_percent(r.focal_coverage),
         fmt_percent(r.quality_score_vs_full), fmt_percent(r.quality_score_vs_all),
         fmt_speed_up(r.speed_up_all))
        for r in report.rows if r.group == TOTAL
    ]
    lines += [""] + _grid(SUMMARY_HEADER, summary)
    return "\n".join(lines) + "\n"


def render_json(report: CampaignReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def parse_json(text: str) -> CampaignReport:
    return CampaignReport.from_dict(json.loads(text))


def render_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(ReportRow)]
    writer.writerow(["cost_mode", *names])
    for r in report.rows:
        d = asdict(r)
        writer.writerow([report.cost_mode, *("" if d[n] is None else _encode(d[n]) for n in names)])
    return buf.getvalue()


def render(report: CampaignReport, fmt: str = "table") -> str:
    if fmt == "table":
        return render_table(report)
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


# -- loading and verification ---------------------------------------------------


def load_campaign(out_dir: Path) -> tuple[dict[str, list[MutantResult]], str]:
    results: dict[str, list[MutantResult]] = {}
    mode = "steps"
    for strategy in STRATEGIES:
        meta, rs = load_results(results_path(out_dir, strategy))
        if meta is not None:
            results[strategy] = rs
            mode = meta.get("mode", mode)
    return results, mode


def load_matrix(out_dir: Path) -> KillMatrix | None:
    path = Path(out_dir) / "matrix.csv"
    if not path.exists():
        return None
    return KillMatrix.from_csv(path.read_text(encoding="utf-8"))


def report_from_dir(out_dir: Path) -> CampaignReport:
    results, mode = load_campaign(out_dir)
    return compute_report(results, cost_mode=mode)


def verify_results(results: Mapping[str, list[MutantResult]], matrix: KillMatrix | None = None,
                   stored: CampaignReport | None = None, cost_mode: str = "steps") -> list[str]:
    """Recompute every metric from raw records; return a list of discrepancies."""
    problems: list[str] = []
    if FULL not in results:
        return ["missing full-suite baseline results"]

    for strategy, rs in results.items():
        for r in rs:
            where = f"{strategy}:{r.mutant_id}"
            if r.status == KILLED and r.tests_executed != r.kill_position:
                problems.append(f"{where}: killed at {r.kill_position} but executed {r.tests_executed}")
            if r.status == SURVIVED and r.tests_executed != r.tests_considered:
                problems.append(f"{where}: survived after {r.tests_executed}/{r.tests_considered} tests")
            if r.status == NOT_COVERED and (r.tests_executed or r.tests_considered):
                problems.append(f"{where}: not covered yet ran tests")
            if r.status == ERROR:
                problems.append(f"{where}: {r.error}")
            if r.tests_considered != len(r.selection) and r.status != NOT_COVERED:
                problems.append(f"{where}: selection size disagrees with tests_considered")

    full_killed = {r.mutant_id for r in results[FULL] if r.killed}
    for strategy, rs in results.items():
        extra = {r.mutant_id for r in rs if r.killed} - full_killed
        if extra:
            problems.append(f"{strategy}: {len(extra)} kills missed by the full suite (monotonicity)")

    if matrix is not None:
        known = set(matrix.mutant_ids)
        for strategy, rs in results.items():
            for r in rs:
                if r.mutant_id not in known:
                    problems.append(f"{strategy}:{r.mutant_id}: absent from kill matrix")
                    continue
                if r.status not in (KILLED, SURVIVED):
                    continue
                status, killer = matrix.status_for(r.mutant_id, r.selection)
                if status != r.status or killer != r.killed_by:
                    problems.append(f"{strategy}:{r.mutant_id}: run says {r.status}/{r.killed_by}, "
                                    f"matrix says {status}/{killer}")
        located = {r.mutant_id for r in results[FULL] if r.focal_located}
        matrix_full = {m for m in located if matrix.killers(m)}
        for strategy, rs in results.items():
            killed = {r.mutant_id for r in rs if r.killed} & located
            expected_fn = len(matrix_full - killed)
            recomputed = compute_report(results, cost_mode=cost_mode).total(strategy).false_negatives
            if recomputed != expected_fn:
                problems.append(f"{strategy}: false negatives {recomputed} != matrix {expected_fn}")

    fresh = compute_report(results, cost_mode=cost_mode)
    for r in fresh.rows:
        if r.false_negatives < 0:
            problems.append(f"{r.group}/{r.technique}: negative false negatives")
        q = r.quality_score_vs_full
        if q is not None and not (0 <= q <= 1):
            problems.append(f"{r.group}/{r.technique}: quality score {q} outside [0, 1]")
        if q is not None and (q == 1) != (r.false_negatives == 0):
            problems.append(f"{r.group}/{r.technique}: quality score and false negatives disagree")
    if stored is not None and stored != fresh:
        for a, b in zip(stored.rows, fresh.rows):
            if a != b:
                problems.append(f"stored report row {a.group}/{a.technique} differs from recomputation")
        if len(stored.rows) != len(fresh.rows):
            problems.append("stored report has a different number of rows")
    return problems
