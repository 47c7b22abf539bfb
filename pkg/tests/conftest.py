import numpy as np
import pytest

from s2choreo import BodySystem, minimize, test_loop


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def three_bodies():
    return BodySystem(3)


@pytest.fixture(scope="session")
def figure_eight(three_bodies):
    """Minimizer output from the test loop at N = 512 (loop, report)."""
    return minimize(test_loop(512), three_bodies)


@pytest.fixture(scope="session")
def figure_eight_closure(figure_eight, three_bodies):
    from s2choreo import closure_error

    return closure_error(figure_eight[0], three_bodies, T=1.0, h=1e-4)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion and return the verdict."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
