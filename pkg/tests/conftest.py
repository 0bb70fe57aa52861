import numpy as np
import pytest

from cylflow.domain import CylinderSpec, build_grid
from cylflow.galerkin import build_divfree_basis


@pytest.fixture(scope="session")
def grid4():
    return build_grid(CylinderSpec(nx=4, ny=4, nz=8))


@pytest.fixture(scope="session")
def grid6():
    return build_grid(CylinderSpec())


@pytest.fixture(scope="session")
def basis4(grid4):
    return build_divfree_basis(grid4)


@pytest.fixture(scope="session")
def basis6(grid6):
    return build_divfree_basis(grid6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_cylflow_acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
