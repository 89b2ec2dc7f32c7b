"""Shared fixtures: small, fast grids reused across the unit tests."""

import numpy as np
import pytest

from dtnlab import (BoundaryCurve, DtnOperator, OperatorSpec, build_boundary_grid,
                    build_grid, decompose)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def disk():
    return BoundaryCurve.circle(1.0)


@pytest.fixture(scope="session")
def ellipse():
    return BoundaryCurve.ellipse(1.3, 0.8)


@pytest.fixture(scope="session")
def star():
    return BoundaryCurve.star(0.15, 3)


@pytest.fixture(scope="session")
def disk_bgrid(disk):
    return build_boundary_grid(disk, 64)


@pytest.fixture(scope="session")
def disk_grid(disk):
    return build_grid(disk, 1.0 / 32.0)


@pytest.fixture(scope="session")
def disk_operator(disk_grid, disk_bgrid):
    return DtnOperator(OperatorSpec.laplacian(), disk_grid, disk_bgrid)


@pytest.fixture(scope="session")
def disk_matrix(disk_operator):
    return disk_operator.matrix()


@pytest.fixture(scope="session")
def disk_dec(disk_matrix):
    return decompose(disk_matrix)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
