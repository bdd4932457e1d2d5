import random

import numpy as np
import pytest


@pytest.fixture
def pyrng():
    return random.Random(20240702)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240702)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k[0]), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
