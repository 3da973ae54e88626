import os
import sys

import pytest

from junolog.ingest import load_corpus
from junolog.synth import SynthConfig, write_corpus

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> (PASS|FAIL, title, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        status, title, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}  {detail}".rstrip())


@pytest.fixture(scope="session")
def synth_files(tmp_path_factory):
    """Default synthetic corpus (seed 42) written once per session."""
    d = tmp_path_factory.mktemp("synth")
    log, labels = d / "synth.log", d / "synth.labels"
    write_corpus(SynthConfig(), log, labels)
    return log, labels


@pytest.fixture(scope="session")
def synth_corpus(synth_files):
    return load_corpus(*synth_files)
