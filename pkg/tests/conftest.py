from fractions import Fraction

import numpy as np
import pytest

from checkerxi.core import CheckerboardMatrix

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def exact(rows, scale=1):
    """Fraction object array ``rows / scale``."""
    return np.array([[Fraction(x).limit_denominator(10**6) / scale for x in row] for row in rows], dtype=object)


@pytest.fixture
def delta2():
    return CheckerboardMatrix(np.array([[3, 1], [1, 3]]) / 8)


@pytest.fixture
def delta2_exact():
    return CheckerboardMatrix(exact([[3, 1], [1, 3]], 8))


@pytest.fixture
def delta4_exact():
    return CheckerboardMatrix(exact([[1, 0, 0, 0], [0, 0.5, 0.5, 0], [0, 0.5, 0.5, 0], [0, 0, 0, 1]], 4))


@pytest.fixture
def acceptance_log():
    def record(name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, passed, detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")
