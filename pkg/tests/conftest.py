"""Shared, session-scoped models and solved fields."""

import math

import numpy as np
import pytest

from qhj import (PotentialModel, decaying_field, find_turning_points, q0_quadrature,
                 solve_q_selfconsistent)
from qhj.qcf import GridSpec

LIN_WINDOW = (-6.0, 12.0)


@pytest.fixture(scope="session")
def lin():
    return PotentialModel.linear(1.0)


@pytest.fixture(scope="session")
def lin_shell(lin):
    return find_turning_points(lin, 0.0, LIN_WINDOW)


@pytest.fixture(scope="session")
def lin_q(lin, lin_shell):
    return solve_q_selfconsistent(lin, lin_shell, grid_spec=GridSpec(window=LIN_WINDOW))


@pytest.fixture(scope="session")
def lin_q0(lin, lin_shell):
    return q0_quadrature(lin, lin_shell, grid_spec=GridSpec(window=LIN_WINDOW))


@pytest.fixture(scope="session")
def lin_outer(lin, lin_shell):
    return decaying_field(lin, lin_shell, "left")


@pytest.fixture(scope="session")
def ho():
    return PotentialModel.harmonic(1.0)


def _ho_case(model, k):
    shell = find_turning_points(model, k, model.default_window(k))
    return shell, solve_q_selfconsistent(model, shell)


@pytest.fixture(scope="session")
def ho_ground(ho):
    """Shell and full ``Q`` at the ground state ``k = 1``."""
    return _ho_case(ho, 1.0)


@pytest.fixture(scope="session")
def ho_excited(ho):
    """Shell and full ``Q`` at the second state ``k = sqrt(5)``."""
    return _ho_case(ho, math.sqrt(5.0))


@pytest.fixture(scope="session")
def ho_offshell(ho):
    """Shell and full ``Q`` between eigenvalues, ``k = 1.5``."""
    return _ho_case(ho, 1.5)


# -- acceptance report -------------------------------------------------------------
_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """``criterion(n, passed, detail)`` records and prints one result line."""

    def record(n, passed, detail):
        line = f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
