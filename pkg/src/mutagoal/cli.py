"""``mutagoal`` command-line entry point.

Exit codes: 0 success, 1 campaign-level failure (load error, failing
precheck, missing baseline, verification mismatch), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from mutagoal.config import SETTINGS, Config, ConfigError, load_config
from mutagoal.corpus import resolve_project
from mutagoal.engine import (
    PrecheckFailed,
    build_kill_matrix,
    mutation_testing,
    precheck,
    write_matrix,
)
from mutagoal.errors import MissingBaselineError, MutagoalError
from mutagoal.focal import build_index
from mutagoal.frontend import load_project
from mutagoal.interp import CostModel
from mutagoal.mutantgen import OPERATORS, generate_mutants, mutant_diff
from mutagoal.reporting import (
    FORMATS,
    compute_report,
    load_campaign,
    load_matrix,
    parse_json,
    render,
    render_json,
    verify_results,
)
from mutagoal.selection import STRATEGIES

def resolve_config(args: argparse.Namespace, project: Optional[Path]) -> Config:
    """Defaults, overridden by ``mutagoal.conf``, overridden by flags."""
    return load_config(project, {k: getattr(args, k, None) for k in SETTINGS})


# -- subcommands -------------------------------------------------------------


def _out_dir(config: Config) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def cmd_check(args, config: Config, project: Path) -> int:
    program = load_project(project)
    for lint in program.lints:
        print(f"lint: {lint}", file=sys.stderr)
    failures = precheck(program, CostModel(config.cost_mode, config.budget))
    if failures:
        print("precheck FAILED; failing tests:")
        for o in failures:
            print(f"  {o.test_id}: {o.verdict.describe()}")
        return 1
    print(f"precheck passed: {len(program.test_ids)} tests, {len(program.classes)} classes")
    return 0


def cmd_mutants(args, config: Config, project: Path) -> int:
    program = load_project(project)
    mutants = generate_mutants(program, config.ops)
    records = []
    for m in mutants:
        print(f"{m.id}  [{m.loc}]  {m.original_text}  =>  {m.mutated_text}")
        if args.diff:
            print(mutant_diff(program, m), end="")
        records.append(json.dumps(m.to_record(), sort_keys=True))
    _write(_out_dir(config), "mutants.jsonl", "".join(r + "\n" for r in records))
    print(f"{len(mutants)} mutants")
    return 0


def cmd_focal(args, config: Config, project: Path) -> int:
    program = load_project(project)
    text = json.dumps(build_index(program).to_record(), indent=2) + "\n"
    _write(_out_dir(config), "focal.json", text)
    sys.stdout.write(text)
    return 0


def cmd_run(args, config: Config, project: Path) -> int:
    program = load_project(project)
    cost = CostModel(config.cost_mode, config.budget)
    out = _out_dir(config)
    index = build_index(program)
    _write(out, "focal.json", json.dumps(index.to_record(), indent=2) + "\n")
    if args.fresh:
        (out / f"results-{config.strategy}.jsonl").unlink(missing_ok=True)
    mutants = generate_mutants(program, config.ops)
    try:
        results = mutation_testing(program, mutants, config.strategy, cost, config.jobs,
                                   out, config.ops, index)
    except PrecheckFailed as exc:
        print("precheck FAILED; aborting campaign. Failing tests:")
        for o in exc.failures:
            print(f"  {o.test_id}: {o.verdict.describe()}")
        return 1
    counts: dict[str, int] = {}
    for r in results:
        counts[r.status] = counts.get(r.status, 0) + 1
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"{config.strategy}: {len(results)} mutants ({summary}) -> {out / f'results-{config.strategy}.jsonl'}")
    return 0


def cmd_matrix(args, config: Config, project: Path) -> int:
    program = load_project(project)
    cost = CostModel(config.cost_mode, config.budget)
    failures = precheck(program, cost)
    if failures:
        print("precheck FAILED; failing tests:")
        for o in failures:
            print(f"  {o.test_id}: {o.verdict.describe()}")
        return 1
    mutants = generate_mutants(program, config.ops)
    matrix = build_kill_matrix(program, mutants, cost, config.jobs)
    path = write_matrix(matrix, _out_dir(config))
    print(f"{len(matrix.mutant_ids)} mutants x {len(matrix.test_ids)} tests -> {path}")
    return 0


def cmd_report(args, config: Config, out: Path) -> int:
    results, mode = load_campaign(out)
    report = compute_report(results, cost_mode=mode)
    _write(out, "report.json", render_json(report))
    sys.stdout.write(render(report, config.format))
    return 0


def cmd_verify(args, config: Config, out: Path) -> int:
    results, mode = load_campaign(out)
    stored = None
    if (out / "report.json").exists():
        stored = parse_json((out / "report.json").read_text(encoding="utf-8"))
    problems = verify_results(results, load_matrix(out), stored, mode)
    if problems:
        for p in problems:
            print(f"MISMATCH {p}")
        return 1
    n = sum(len(rs) for rs in results.values())
    print(f"verified {n} result records across {', '.join(results)}")
    return 0


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mutagoal", description="Goal-oriented mutation testing for MiniLang.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def project_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("project", help="project directory (src/, tests/) or bundled corpus name")
        p.add_argument("--out", help="output directory (default ./out)")
        return p

    def add_ops(p):
        p.add_argument("--ops", help=f"comma-separated operators (default {','.join(OPERATORS)})")

    def add_exec(p):
        p.add_argument("--budget", help="step budget per test (default 1000000)")
        p.add_argument("--jobs", help="worker processes (default 1)")
        p.add_argument("--cost-mode", dest="cost_mode", choices=("steps", "wall"),
                       help="run-time measure used by reports (default steps)")

    p = project_cmd("check", "run every test on the unmutated program")
    p.add_argument("--budget", help="step budget per test")
    p = project_cmd("mutants", "list generated mutants")
    add_ops(p)
    p.add_argument("--diff", action="store_true", help="show a unified diff per mutant")
    project_cmd("focal", "dump the focal-method index")
    p = project_cmd("run", "execute a mutation campaign")
    p.add_argument("--strategy", choices=STRATEGIES, help="test selection strategy (default focal)")
    p.add_argument("--fresh", action="store_true", help="discard previous results instead of resuming")
    add_ops(p)
    add_exec(p)
    p = project_cmd("matrix", "build the exhaustive mutant x test kill matrix")
    add_ops(p)
    add_exec(p)

    for name, help_text in (("report", "render campaign metrics"), ("verify", "recompute and cross-check")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("out", nargs="?", help="output directory holding campaign results")
        if name == "report":
            p.add_argument("--format", choices=FORMATS, help="table, json or csv (default table)")
    return parser


COMMANDS = {
    "check": cmd_check, "mutants": cmd_mutants, "focal": cmd_focal, "run": cmd_run,
    "matrix": cmd_matrix, "report": cmd_report, "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("report", "verify"):
            config = resolve_config(args, None)
            out = Path(args.out or config.out)
            if not out.is_dir():
                print(f"mutagoal: no such output directory: {out}", file=sys.stderr)
                return 1
            return COMMANDS[args.command](args, config, out)
        project = resolve_project(args.project)
        config = resolve_config(args, project)
        return COMMANDS[args.command](args, config, project)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"mutagoal: error: {exc}", file=sys.stderr)
        return 2
    except MissingBaselineError as exc:
        print(f"mutagoal: {exc}", file=sys.stderr)
        return 1
    except (MutagoalError, FileNotFoundError) as exc:
        print(f"mutagoal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
