import sys

import pytest

from maxrep.hyperbolic import octagon_hyperbolization
from maxrep.max_reps import compose_rep, diagonal_embedding, irreducible_embedding


@pytest.fixture(scope="session")
def octagon():
    return octagon_hyperbolization()


@pytest.fixture(scope="session")
def diag2(octagon):
    return compose_rep(octagon, diagonal_embedding(2))


@pytest.fixture(scope="session")
def irr2(octagon):
    return compose_rep(octagon, irreducible_embedding(2))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT_LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
