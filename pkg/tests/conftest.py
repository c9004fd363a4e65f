import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

DATA = Path(__file__).parent / "data"
REAL_CORPUS_DIR = Path(os.environ.get("SEMHASH_CORPUS_DIR",
                                      Path(__file__).parents[1] / "data"))


@pytest.fixture
def toy_path():
    return DATA / "toy_corpus.json"


def real_corpus(short_name):
    """Path of a benchmark corpus, or None when it is not available locally."""
    from semhash_intent.corpus import find_corpus

    try:
        return find_corpus(REAL_CORPUS_DIR, short_name)
    except FileNotFoundError:
        return None


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::test_criterion_")[1].split("[")[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        prev = _ACCEPTANCE.get(name, True)
        _ACCEPTANCE[name] = prev and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        num, _, label = name.partition("_")
        status = "PASS" if _ACCEPTANCE[name] else "FAIL"
        terminalreporter.write_line(f"{status} criterion {int(num):>2}: {label.replace('_', ' ')}")
