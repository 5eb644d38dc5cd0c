from __future__ import annotations

import json

import pytest

from helpers import write_project
from mutagoal.corpus import predicted_cost
from mutagoal.engine import (
    KILLED,
    NOT_COVERED,
    SURVIVED,
    KillMatrix,
    MutantResult,
    PrecheckFailed,
    build_kill_matrix,
    evaluate_mutant,
    load_results,
    mutation_testing,
    precheck,
    results_path,
    run_campaign,
)
from mutagoal.focal import build_index
from mutagoal.frontend import load_project
from mutagoal.interp import ASSERTION_FAILURE, CostModel
from mutagoal.mutantgen import OPERATORS, generate_mutants
from mutagoal.selection import STRATEGIES


def test_precheck_passes_on_bank(bank):
    assert precheck(bank) == []


def test_precheck_reports_failing_tests(bank_copy):
    write_project(bank_copy, {"tests/broken_test.mini": """\
        suite BrokenTest {
            test testBroken {
                a := new Account()
                assertEqual(a.getBalance(), 1)
            }
        }
    """})
    failures = precheck(load_project(bank_copy))
    assert [o.test_id for o in failures] == ["BrokenTest.testBroken"]


def test_withdraw_sign_flip_is_killed(bank):
    index = build_index(bank)
    m = next(m for m in generate_mutants(bank) if m.method_name == "withdraw" and m.operator == "AOR")
    result = evaluate_mutant(bank, m, "focal", CostModel(), index)
    assert result.status == KILLED
    assert result.killed_by == "AccountTest.testWithdraw"
    assert result.kill_verdict == ASSERTION_FAILURE
    assert (result.tests_considered, result.tests_executed, result.kill_position) == (1, 1, 1)


def test_mutant_in_non_focal_method_is_not_covered(bank):
    index = build_index(bank)
    m = next(m for m in generate_mutants(bank) if m.method_name == "deposit")
    result = evaluate_mutant(bank, m, "focal", CostModel(), index)
    assert result.status == NOT_COVERED
    assert (result.tests_considered, result.tests_executed, result.cost_steps) == (0, 0, 0)
    assert evaluate_mutant(bank, m, "full", CostModel(), index).status in (KILLED, SURVIVED)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_campaign_agrees_with_kill_matrix(synthetic, strategy):
    matrix = synthetic.matrix
    for r in synthetic.results[strategy]:
        if r.status == NOT_COVERED:
            assert strategy == "focal" and not synthetic.index.is_focal(r.method_ref)
            continue
        status, killer = matrix.status_for(r.mutant_id, r.selection)
        assert (r.status, r.killed_by) == (status, killer), r.mutant_id
        assert r.cost_steps == predicted_cost(matrix, r.mutant_id, r.selection)


def test_results_follow_generation_order(synthetic):
    ids = [m.id for m in synthetic.mutants]
    for results in synthetic.results.values():
        assert [r.mutant_id for r in results] == ids


def test_parallel_campaign_matches_serial(synthetic):
    subset = synthetic.mutants[:120]
    serial = run_campaign(synthetic.program, subset, "class", synthetic.cost, 1, synthetic.index)
    parallel = run_campaign(synthetic.program, subset, "class", synthetic.cost, 4, synthetic.index)
    assert [r.to_record() for r in parallel] == [r.to_record() for r in serial]


def test_parallel_matrix_matches_serial(synthetic):
    subset = synthetic.mutants[:60]
    serial = build_kill_matrix(synthetic.program, subset, synthetic.cost, 1)
    assert build_kill_matrix(synthetic.program, subset, synthetic.cost, 3) == serial


def test_matrix_csv_round_trip(synthetic):
    text = synthetic.matrix.to_csv()
    assert KillMatrix.from_csv(text) == synthetic.matrix
    header = text.splitlines()[0].split(",")
    assert header[0] == "mutant" and header[1:] == synthetic.program.test_ids


def test_matrix_kill_count_matches_manifest(synthetic):
    kills_any = sum(1 for row in synthetic.matrix.kills if any(row))
    assert kills_any == synthetic.manifest["matrix_kills"]


def test_record_round_trip(synthetic):
    for r in synthetic.results["full"][:50]:
        assert MutantResult.from_record(json.loads(json.dumps(r.to_record()))) == r
    assert "wall_time" not in synthetic.results["full"][0].to_record()
    assert "wall_time" in synthetic.results["full"][0].to_record(with_wall=True)


def test_mutation_testing_aborts_on_failing_precheck(bank_copy, tmp_path):
    write_project(bank_copy, {"tests/broken_test.mini": """\
        suite BrokenTest {
            test testBroken {
                assertTrue(false)
            }
        }
    """})
    program = load_project(bank_copy)
    with pytest.raises(PrecheckFailed) as info:
        mutation_testing(program, generate_mutants(program), "full", CostModel(), 1, tmp_path, OPERATORS)
    assert [o.test_id for o in info.value.failures] == ["BrokenTest.testBroken"]
    assert not results_path(tmp_path, "full").exists()


def _run(program, out, cost=CostModel()):
    return mutation_testing(program, generate_mutants(program), "full", cost, 1, out, OPERATORS)


def test_resume_after_interruption_is_byte_identical(bank, tmp_path):
    fresh_dir, resumed_dir = tmp_path / "fresh", tmp_path / "resumed"
    _run(bank, fresh_dir)
    expected = results_path(fresh_dir, "full").read_text()
    # keep the meta line, three whole records and a torn fourth one
    lines = expected.splitlines(keepends=True)
    resumed_dir.mkdir()
    results_path(resumed_dir, "full").write_text("".join(lines[:4]) + lines[4][:20])
    _run(bank, resumed_dir)
    assert results_path(resumed_dir, "full").read_text() == expected


def test_resume_skips_finished_mutants(bank, tmp_path, monkeypatch):
    _run(bank, tmp_path)
    calls = []
    import mutagoal.engine as engine

    monkeypatch.setattr(engine, "_evaluate", lambda i: calls.append(i))
    _run(bank, tmp_path)
    assert calls == []


def test_changed_settings_restart_the_campaign(bank, tmp_path):
    _run(bank, tmp_path)
    _run(bank, tmp_path, CostModel(budget=5000))
    meta, results = load_results(results_path(tmp_path, "full"))
    assert meta["budget"] == 5000
    assert len(results) == len(generate_mutants(bank))


def test_wall_mode_records_wall_time(bank, tmp_path):
    _run(bank, tmp_path, CostModel(mode="wall"))
    meta, results = load_results(results_path(tmp_path, "full"))
    assert meta["mode"] == "wall"
    lines = results_path(tmp_path, "full").read_text().splitlines()[1:]
    assert all("wall_time" in json.loads(line) for line in lines)
