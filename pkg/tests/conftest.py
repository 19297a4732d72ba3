import functools
import warnings

import pytest

from quarterwalk import oracle
from quarterwalk.gfeval import build_pipeline

warnings.filterwarnings("ignore", category=RuntimeWarning)

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def pipeline(steps, z, cgf="general", hint="half", cut="upper"):
    return build_pipeline(steps, z, cgf=cgf, hint=hint, cut=cut)


@functools.lru_cache(maxsize=None)
def counts(steps, n_max):
    return oracle.count(steps, n_max)


@pytest.fixture
def get_pipeline():
    return pipeline


@pytest.fixture
def get_counts():
    return counts


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
