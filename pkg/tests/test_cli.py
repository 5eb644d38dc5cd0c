from __future__ import annotations

import json

import pytest

from helpers import write_project
from mutagoal.cli import main
from mutagoal.config import Config, ConfigError, load_config, read_config_file
from mutagoal.interp import DEFAULT_BUDGET
from mutagoal.mutantgen import OPERATORS

BROKEN = {"tests/broken_test.mini": """\
    suite BrokenTest {
        test testBroken {
            a := new Account()
            assertEqual(a.getBalance(), 7)
        }
    }
"""}


@pytest.fixture()
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_check_passes(in_tmp, capsys):
    assert main(["check", "bank-account"]) == 0
    assert "precheck passed: 1 tests, 1 classes" in capsys.readouterr().out


def test_check_fails_on_broken_test(bank_copy, in_tmp, capsys):
    write_project(bank_copy, BROKEN)
    assert main(["check", str(bank_copy)]) == 1
    assert "BrokenTest.testBroken" in capsys.readouterr().out


def test_focal_prints_index(in_tmp, capsys):
    assert main(["focal", "bank-account"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["tests"][0]["focal_methods"] == ["Account.withdraw"]
    assert (in_tmp / "out" / "focal.json").exists()


def test_mutants_lists_and_writes_records(in_tmp, capsys):
    assert main(["mutants", "bank-account", "--ops", "aor", "--diff"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("2 mutants")
    assert "+        self.balance := self.balance + n" in out
    lines = (in_tmp / "out" / "mutants.jsonl").read_text().splitlines()
    assert [json.loads(line)["operator"] for line in lines] == ["AOR", "AOR"]


def test_run_report_verify_pipeline(in_tmp, capsys):
    for strategy in ("full", "class", "focal"):
        assert main(["run", "bank-account", "--strategy", strategy]) == 0
    assert main(["matrix", "bank-account"]) == 0
    assert main(["report"]) == 0
    out = capsys.readouterr().out
    assert "Focal Methods" in out and "N.A." in out
    assert (in_tmp / "out" / "report.json").exists()
    assert main(["verify"]) == 0
    assert "verified 30 result records" in capsys.readouterr().out


def test_report_formats(in_tmp, capsys):
    main(["run", "bank-account", "--strategy", "full"])
    capsys.readouterr()
    assert main(["report", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["rows"]
    assert main(["report", "out", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("cost_mode,group,technique")


def test_outputs_stay_in_out_dir(in_tmp):
    target = in_tmp / "results"
    main(["run", "bank-account", "--strategy", "full", "--out", str(target)])
    main(["report", str(target)])
    assert sorted(p.name for p in in_tmp.iterdir()) == ["results"]
    assert sorted(p.name for p in target.iterdir()) == ["focal.json", "report.json", "results-full.jsonl"]


def test_report_without_baseline_exits_1(in_tmp, capsys):
    assert main(["run", "bank-account", "--strategy", "focal"]) == 0
    assert main(["report"]) == 1
    assert "full" in capsys.readouterr().err


def test_report_without_out_dir_exits_1(in_tmp):
    assert main(["report", "nowhere"]) == 1
    assert main(["verify", "nowhere"]) == 1


def test_verify_detects_tampered_record(in_tmp, capsys):
    main(["run", "bank-account", "--strategy", "full"])
    main(["run", "bank-account", "--strategy", "focal"])
    main(["matrix", "bank-account"])
    path = in_tmp / "out" / "results-focal.jsonl"
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines[1:], 1):
        record = json.loads(line)
        if record["status"] == "killed":
            record["status"] = "survived"
            lines[i] = json.dumps(record, sort_keys=True)
            break
    path.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert main(["verify"]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_run_aborts_on_failing_precheck(bank_copy, in_tmp, capsys):
    write_project(bank_copy, BROKEN)
    assert main(["run", str(bank_copy), "--strategy", "full"]) == 1
    out = capsys.readouterr().out
    listed = [line.split(":")[0].strip() for line in out.splitlines()[1:]]
    assert listed == ["BrokenTest.testBroken"]
    assert not (in_tmp / "out" / "results-full.jsonl").exists()


@pytest.mark.parametrize("argv", [
    ["run", "bank-account", "--strategy", "nonsense"],
    ["run", "bank-account", "--ops", "XYZ"],
    ["run", "bank-account", "--jobs", "0"],
    ["run", "bank-account", "--budget", "lots"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(in_tmp, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_unknown_project_exits_1(in_tmp, capsys):
    assert main(["check", "no-such-project"]) == 1
    assert "no such project" in capsys.readouterr().err


def test_bad_config_file_exits_2(bank_copy, in_tmp):
    (bank_copy / "mutagoal.conf").write_text("colour = blue\n")
    assert main(["check", str(bank_copy)]) == 2


# -- configuration precedence --------------------------------------------------


@pytest.mark.parametrize("file_text, flags, expected", [
    (None, {}, Config()),
    ("budget = 500\n", {}, Config(budget=500)),
    ("budget = 500\n", {"budget": "700"}, Config(budget=700)),
    (None, {"budget": "700"}, Config(budget=700)),
    ("strategy = class  # comment\nops = ror, aor\n", {"strategy": "full"},
     Config(strategy="full", ops=("AOR", "ROR"))),
    ("cost-mode = wall\njobs = 3\n", {"jobs": None}, Config(cost_mode="wall", jobs=3)),
])
def test_config_precedence(tmp_path, file_text, flags, expected):
    if file_text is not None:
        (tmp_path / "mutagoal.conf").write_text(file_text)
    assert load_config(tmp_path, flags) == expected


def test_config_defaults():
    config = Config()
    assert (config.strategy, config.budget, config.jobs, config.ops) == ("focal", DEFAULT_BUDGET, 1, OPERATORS)


@pytest.mark.parametrize("text", ["budget = -1\n", "strategy = random\n", "just words\n", "format = html\n"])
def test_config_file_validation(tmp_path, text):
    (tmp_path / "mutagoal.conf").write_text(text)
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "mutagoal.conf")


def test_budget_flag_reaches_the_campaign(in_tmp):
    main(["run", "bank-account", "--strategy", "full", "--budget", "5000"])
    meta = json.loads((in_tmp / "out" / "results-full.jsonl").read_text().splitlines()[0])
    assert meta["budget"] == 5000
