import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dualcurv.generators import cross_polytope, cube, random_tangent, shifted_cube, simplex_centered
from dualcurv.geometry import Subspace

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def cube3():
    return cube(3)


@pytest.fixture(scope="session")
def polytope_suite():
    return [cube(3), cross_polytope(3), simplex_centered(3), shifted_cube(3, 0.3),
            random_tangent(3, 10, 0), random_tangent(3, 12, 1)]


@pytest.fixture(scope="session")
def e1():
    return Subspace.coordinate(3, [0])


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record and print one summary line per acceptance criterion."""

    def emit(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
