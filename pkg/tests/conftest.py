import sys
from fractions import Fraction

import pytest

ROT = [[Fraction(4, 5), Fraction(3, 5)], [Fraction(-3, 5), Fraction(4, 5)]]
CISSOID = "x^3 + x*y^2 - 2*y^2 = 0"
LINE = "y - x + 1 = 0"


@pytest.fixture
def rot():
    return ROT


# acceptance criteria register a line here; printed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
