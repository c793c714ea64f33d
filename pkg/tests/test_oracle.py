import math

import numpy as np
import pytest
from scipy.special import airy, eval_hermite

from qhj import (ConfigError, OracleSolution, PotentialModel, airy_exact_q, analytic_ho_spectrum,
                 hermite_state, numerov_eigen, numerov_solve)
from qhj.oracle import OracleSource, hermite_solution
from qhj.potential import momentum_derivatives
from qhj.qcf import wkb_p1


@pytest.mark.parametrize("n", [0, 1, 3, 6, 10])
def test_numerov_ho_eigenvalues(ho, n):
    sol = numerov_eigen(ho, n)
    assert sol.eigen_k**2 == pytest.approx(2 * n + 1, abs=1e-8)
    assert sol.source is OracleSource.NUMEROV


def test_numerov_eigenfunction_matches_hermite(ho):
    sol = numerov_eigen(ho, 3)
    ref = hermite_state(3, sol.grid)
    c = np.dot(sol.psi, ref) / np.dot(ref, ref)
    assert np.max(np.abs(sol.psi - c * ref)) < 1e-6 * np.max(np.abs(ref * c))


def test_numerov_eigenvalues_scale_with_omega_and_hbar():
    m = PotentialModel.harmonic(2.0, hbar=0.5)
    ref = analytic_ho_spectrum(2, 2.0, 0.5)
    for n in range(3):
        assert numerov_eigen(m, n).eigen_k == pytest.approx(ref[n], rel=1e-8)


def test_numerov_linear_is_airy(lin):
    grid = np.linspace(-5.0, 12.0, 17001)
    sol = numerov_solve(lin, 0.0, grid, bc="left")
    m = (grid >= -5) & (grid <= 5)
    corr = np.corrcoef(sol.psi[m], airy(-grid[m])[0])[0, 1]
    assert corr >= 1 - 1e-8
    assert sol.recurrence_residual(lin) < 1e-10


def test_numerov_right_sweep(ho):
    grid = np.linspace(-6, 6, 6001)
    left = numerov_solve(ho, 1.0, grid, "left")
    right = numerov_solve(ho, 1.0, grid, "right")
    # at an eigenvalue both sweeps give the ground state
    m = np.abs(grid) < 4
    np.testing.assert_allclose(np.abs(left.psi[m]), np.abs(right.psi[m]), atol=1e-5)


def test_numerov_eigen_bc_uses_node_count(ho):
    grid = np.linspace(-7, 7, 7001)
    sol = numerov_solve(ho, 1.1, grid, "eigen")
    assert sol.eigen_k**2 == pytest.approx(3.0, abs=1e-5)


def test_numerov_validation(ho):
    with pytest.raises(ConfigError):
        numerov_solve(ho, 1.0, np.array([0.0, 1.0, 3.0]))
    with pytest.raises(ConfigError):
        numerov_solve(ho, 1.0, np.linspace(0, 1, 11), bc="both")


def test_airy_exact_q_far_field(lin, lin_shell):
    q = airy_exact_q(lin, lin_shell, 20.0)
    p1 = wkb_p1(lin, 0.0, 20.0)
    assert abs(q - p1) < 0.05 * abs(p1)


def test_airy_exact_q_regular_at_turning_point(lin, lin_shell):
    q = airy_exact_q(lin, lin_shell, 0.0)
    assert np.isfinite(q) and 0.1 < abs(q) < 2


def test_airy_exact_q_solves_riccati(lin, lin_shell):
    xs = np.linspace(-3.0, 10.0, 53)
    xs = xs[np.abs(xs) > 1e-3]
    h = 1e-5
    Q = airy_exact_q(lin, lin_shell, xs)
    dQ = (airy_exact_q(lin, lin_shell, xs + h) - airy_exact_q(lin, lin_shell, xs - h)) / (2 * h)
    p, dp = momentum_derivatives(lin, 0.0, xs, order=1)
    res = np.abs(Q * (2 * p + Q) - 1j * (dp + dQ))
    assert np.max(res) < 1e-8


def test_hermite_examples():
    assert hermite_state(0, 1.0) / hermite_state(0, 0.0) == pytest.approx(math.exp(-0.5))
    assert hermite_state(1, 0.0) == pytest.approx(0.0, abs=1e-15)
    x2 = math.sqrt(21.0)
    xs = np.linspace(-x2, x2, 20001)
    psi = hermite_state(10, xs)
    assert np.count_nonzero(np.sign(psi[1:]) != np.sign(psi[:-1])) == 10


def test_hermite_normalised_and_matches_scipy():
    x = np.linspace(-10, 10, 20001)
    for n in (0, 4, 9):
        psi = hermite_state(n, x)
        assert np.trapezoid(psi**2, x) == pytest.approx(1.0, rel=1e-10)
        ref = eval_hermite(n, x) * np.exp(-x * x / 2)
        c = psi[10000 + 37] / ref[10000 + 37]
        np.testing.assert_allclose(psi, c * ref, atol=1e-12)


def test_hermite_solution_wraps_state():
    sol = hermite_solution(2, np.linspace(-3, 3, 7))
    assert isinstance(sol, OracleSolution) and sol.eigen_k == pytest.approx(math.sqrt(5))


def test_analytic_spectrum():
    np.testing.assert_allclose(analytic_ho_spectrum(3) ** 2, [1, 3, 5, 7])
