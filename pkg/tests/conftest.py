"""Shared fixtures and the acceptance-line reporter.

The ``zoo`` fixture gives one representative per potential family plus a
couple of edge members; property suites iterate over it.  Acceptance tests
register a one-line verdict per criterion which is echoed in the terminal
summary so the gate is visible regardless of capture settings.
"""

import pytest

import trotter_lab as tl

_ACCEPTANCE_LINES = []


def record_acceptance(line: str):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def zoo():
    return [
        ("constant", tl.Constant(1.0)),
        ("zero", tl.Constant(0.0)),
        ("linear", tl.Linear()),
        ("affine", tl.Linear(slope=0.5, intercept=0.25)),
        ("steps", tl.PiecewiseConstant([0.0, 0.25, 0.5, 1.0], [1.0, 0.0, 2.0])),
        ("weier", tl.build_weierstrass(0.5, 8)),
        ("tent", tl.build_tent_train([1.0 / j for j in range(1, 7)])),
        ("cantor3", tl.build_cantor(3)[0]),
    ]
