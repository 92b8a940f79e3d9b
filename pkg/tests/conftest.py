import random
import sys

import pytest


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None) if mod else None
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)

from edgehe.modarith import find_context
from edgehe.ntt import NttPlan


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def ctx256():
    return find_context(256, 30)


@pytest.fixture
def plan256(ctx256):
    return NttPlan(256, ctx256)
