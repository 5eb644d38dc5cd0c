"""Bundled corpora and their committed ground-truth manifests.

Each corpus is a regular project directory (``src/``, ``tests/``) under
``mutagoal/fixtures/<name>/`` with a ``manifest.json`` holding what the
brute-force oracles computed when it was last regenerated: the focal index,
the per-operator mutant counts, a digest of the exhaustive kill matrix and
the per-strategy outcomes that follow from that matrix.

Regenerate with ``python3 -m mutagoal.corpus regenerate [NAME ...]``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from mutagoal.config import load_config
from mutagoal.engine import KillMatrix, build_kill_matrix
from mutagoal.errors import ManifestDriftError
from mutagoal.focal import FocalIndex, build_index
from mutagoal.frontend import load_project, read_tree
from mutagoal.frontend.nodes import Program
from mutagoal.interp import CostModel
from mutagoal.mutantgen import count_by_operator, generate_mutants, program_digest
from mutagoal.selection import STRATEGIES, select
from mutagoal.synth import generate

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
MANIFEST = "manifest.json"
SYNTHETIC = "synthetic"
REGENERATE = "python3 -m mutagoal.corpus regenerate {name}"

# fields compared by load_corpus; the matrix-derived ones are costlier and
# checked by check_manifest instead
_CHEAP = ("source_digest", "classes", "tests", "focal", "method_kinds", "mutants_per_operator")


def corpus_names() -> list[str]:
    return sorted(p.name for p in FIXTURES_DIR.iterdir() if (p / "src").is_dir())


def corpus_dir(name: str) -> Path:
    path = FIXTURES_DIR / name
    if not (path / "src").is_dir():
        raise FileNotFoundError(f"no bundled corpus named {name!r} (have: {', '.join(corpus_names())})")
    return path


def resolve_project(arg: str | Path) -> Path:
    """An existing directory as-is, else a bundled corpus of the same name.

    ``fixtures/bank-account`` therefore works from any working directory.
    """
    path = Path(arg)
    if path.is_dir():
        return path
    if (FIXTURES_DIR / path.name / "src").is_dir():
        return FIXTURES_DIR / path.name
    raise FileNotFoundError(f"no such project directory: {arg}")


def corpus_cost(name: str) -> CostModel:
    """Cost model the corpus's ``mutagoal.conf`` asks for."""
    config = load_config(corpus_dir(name))
    return CostModel(config.cost_mode, config.budget)


def matrix_digest(matrix: KillMatrix) -> str:
    return hashlib.sha256(matrix.to_csv().encode("utf-8")).hexdigest()


def predicted_cost(matrix: KillMatrix, mutant_id: str, selection: Sequence[str]) -> int:
    """Steps an early-stopping run of ``selection`` costs, read off the matrix.

    A failing test stops where it fails, so its matrix cell already holds the
    steps it consumes before the stop.
    """
    row = matrix.row(mutant_id)
    steps = dict(zip(matrix.test_ids, matrix.steps[matrix.mutant_ids.index(mutant_id)]))
    total = 0
    for tid in selection:
        total += steps[tid]
        if row[tid]:
            break
    return total


def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def strategy_outcomes(program: Program, index: FocalIndex, mutants, matrix: KillMatrix) -> dict:
    """Per-strategy kills, false negatives and speed-ups implied by ``matrix``."""
    located = {m.id for m in mutants if index.is_focal(m.method_ref)}
    per: dict[str, dict] = {}
    for strategy in STRATEGIES:
        killed, cost_fl, cost_all = set(), 0, 0
        for m in mutants:
            sel = select(m, program, index, strategy).tests
            cost = predicted_cost(matrix, m.id, sel)
            cost_all += cost
            if m.id in located:
                cost_fl += cost
            if matrix.status_for(m.id, sel)[0] == "killed":
                killed.add(m.id)
        per[strategy] = {"killed": killed, "cost_fl": cost_fl, "cost_all": cost_all}
    full = per["full"]
    out = {}
    for strategy, data in per.items():
        entry = {
            "killed": len(data["killed"]),
            "focal_killed": len(data["killed"] & located),
            "false_negatives": len((full["killed"] - data["killed"]) & located),
            "run_time": data["cost_fl"],
            "run_time_all": data["cost_all"],
        }
        if strategy != "full":
            entry["speed_up"] = _frac(Fraction(full["cost_fl"], data["cost_fl"])) if data["cost_fl"] else None
            entry["speed_up_all"] = _frac(Fraction(full["cost_all"], data["cost_all"])) if data["cost_all"] else None
        out[strategy] = entry
    return out


def source_digest(project: Path) -> str:
    h = hashlib.sha256()
    for path, text in sorted(read_tree(project).items()):
        h.update(path.encode() + b"\0" + text.encode() + b"\0")
    return h.hexdigest()


def _cheap_facts(name: str, program: Program) -> dict:
    index = build_index(program)
    mutants = generate_mutants(program)
    return {
        "source_digest": source_digest(corpus_dir(name)),
        "classes": [c.name for c in program.classes],
        "tests": list(program.test_ids),
        "focal": {tid: list(refs) for tid, refs in index.focal.items()},
        "method_kinds": dict(index.kinds),
        "mutants_per_operator": count_by_operator(mutants),
    }


def compute_manifest(name: str) -> dict:
    """Run every oracle over the corpus and return the manifest contents."""
    project = corpus_dir(name)
    program = load_project(project)
    cost = corpus_cost(name)
    index = build_index(program)
    mutants = generate_mutants(program)
    matrix = build_kill_matrix(program, mutants, cost)
    located = sum(1 for m in mutants if index.is_focal(m.method_ref))
    manifest = {
        "name": name,
        "generated_by": REGENERATE.format(name=name),
        **_cheap_facts(name, program),
        "program_digest": program_digest(program),
        "budget": cost.budget,
        "mutant_count": len(mutants),
        "focal_located": located,
        "focal_coverage": _frac(Fraction(located, len(mutants))) if mutants else None,
        "matrix_digest": matrix_digest(matrix),
        "matrix_kills": sum(1 for row in matrix.kills if any(row)),
        "strategies": strategy_outcomes(program, index, mutants, matrix),
    }
    return manifest


def read_manifest(name: str) -> dict:
    return json.loads((corpus_dir(name) / MANIFEST).read_text(encoding="utf-8"))


def write_manifest(name: str) -> dict:
    if name == SYNTHETIC:
        write_synthetic(FIXTURES_DIR / name)
    manifest = compute_manifest(name)
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (corpus_dir(name) / MANIFEST).write_text(text, encoding="utf-8")
    return manifest


def write_synthetic(target: Path) -> None:
    for rel, text in generate().items():
        path = target / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _drift(expected: dict, actual: dict, keys) -> list[str]:
    return [k for k in keys if expected.get(k) != actual.get(k)]


def load_corpus(name: str) -> tuple[Program, dict]:
    """Parse a bundled corpus and validate it against its manifest."""
    project = corpus_dir(name)
    manifest = read_manifest(name)
    program = load_project(project)
    stale = _drift(manifest, _cheap_facts(name, program), _CHEAP)
    if stale:
        raise ManifestDriftError(
            f"corpus {name!r} no longer matches its manifest ({', '.join(stale)}); "
            f"regenerate with: {REGENERATE.format(name=name)}"
        )
    return program, manifest


def check_manifest(name: str) -> list[str]:
    """Recompute the full manifest; return the keys that differ."""
    expected = read_manifest(name)
    actual = compute_manifest(name)
    return sorted(k for k in expected.keys() | actual.keys() if expected.get(k) != actual.get(k))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="python3 -m mutagoal.corpus")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in ("regenerate", "check"):
        p = sub.add_parser(cmd)
        p.add_argument("names", nargs="*", help="corpora (default: all)")
    args = parser.parse_args(argv)
    names = args.names or corpus_names()
    status = 0
    for name in names:
        if args.command == "regenerate":
            m = write_manifest(name)
            print(f"{name}: {m['mutant_count']} mutants, {len(m['tests'])} tests, matrix {m['matrix_digest'][:12]}")
        else:
            diff = check_manifest(name)
            print(f"{name}: {'ok' if not diff else 'DRIFT in ' + ', '.join(diff)}")
            status |= bool(diff)
    return status


if __name__ == "__main__":
    sys.exit(main())
