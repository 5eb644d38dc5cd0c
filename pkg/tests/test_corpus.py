from __future__ import annotations

import shutil
from fractions import Fraction

import pytest

import mutagoal.corpus as corpus
from mutagoal.corpus import check_manifest, corpus_dir, corpus_names, load_corpus, read_manifest
from mutagoal.errors import ManifestDriftError
from mutagoal.frontend import read_tree
from mutagoal.synth import CONFIG_TEXT, generate


def test_bundled_corpora():
    assert corpus_names() == ["bank-account", "eager-test", "synthetic", "uncovered-helper"]


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_loads_against_its_manifest(name):
    program, manifest = load_corpus(name)
    assert manifest["name"] == name
    assert manifest["tests"] == program.test_ids


@pytest.mark.parametrize("name", corpus_names())
def test_manifest_regeneration_is_idempotent(name):
    assert check_manifest(name) == []


def test_drift_is_reported_with_regenerate_command(tmp_path, monkeypatch):
    fixtures = tmp_path / "fixtures"
    shutil.copytree(corpus_dir("bank-account"), fixtures / "bank-account")
    source = fixtures / "bank-account" / "src" / "account.mini"
    source.write_text(source.read_text().replace("n > 0", "n > 1"))
    monkeypatch.setattr(corpus, "FIXTURES_DIR", fixtures)
    with pytest.raises(ManifestDriftError, match="source_digest") as info:
        load_corpus("bank-account")
    assert "python3 -m mutagoal.corpus regenerate bank-account" in str(info.value)


def test_committed_synthetic_sources_match_generator():
    committed = read_tree(corpus_dir("synthetic"))
    generated = {k: v for k, v in generate().items() if k.endswith(".mini")}
    assert committed == generated
    assert (corpus_dir("synthetic") / "mutagoal.conf").read_text() == CONFIG_TEXT


def test_generator_is_seed_deterministic():
    assert generate(7, 2) == generate(7, 2)
    assert generate(7, 2) != generate(8, 2)


def test_synthetic_corpus_size():
    manifest = read_manifest("synthetic")
    assert manifest["mutant_count"] >= 500
    assert manifest["mutant_count"] == sum(manifest["mutants_per_operator"].values())
    assert manifest["budget"] == 1000


def test_uncovered_helper_lowers_focal_coverage():
    manifest = read_manifest("uncovered-helper")
    assert Fraction(manifest["focal_coverage"]) < 1
    assert manifest["strategies"]["focal"]["false_negatives"] == 0


def test_eager_test_manifest_lists_three_focal_methods():
    manifest = read_manifest("eager-test")
    assert manifest["focal"]["DevicesTest.testEverything"] == ["Dial.turn", "Door.open", "Lamp.switchOn"]


def test_regenerate_cli_check(capsys):
    assert corpus.main(["check", "bank-account"]) == 0
    assert "bank-account: ok" in capsys.readouterr().out
