from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from helpers import Campaign, campaign
from mutagoal.corpus import corpus_dir, load_corpus


@pytest.fixture(scope="session")
def bank():
    program, manifest = load_corpus("bank-account")
    return program


@pytest.fixture()
def bank_copy(tmp_path) -> Path:
    """A writable copy of the bank-account project."""
    return Path(shutil.copytree(corpus_dir("bank-account"), tmp_path / "bank-account"))


@pytest.fixture(scope="session")
def synthetic() -> Campaign:
    return campaign("synthetic")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[n])
