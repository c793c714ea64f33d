import os
import subprocess
import sys

import numpy as np
import pytest

from qhj import kernels
from qhj._jit import BACKEND, python_impl

UCOEF = np.array([0.0, 0.0, 1.0])


def _riccati(impl, x_end=3.5):
    return impl(UCOEF, 1.0, 1.0, 0.0, 1.0 + 0.0j, 0j, x_end, 1e-12, 1e-14, 1e-3, 2_000_000)


def test_riccati_ground_state_is_exact():
    # P = i x solves P' = -i (P^2 - 1 + x^2) for the oscillator ground state
    n, xs, ys, dense, status = kernels.dopri5_riccati(UCOEF, 1.0, 1.0, 0.0, 0j, 0j, 3.0,
                                                      1e-12, 1e-14, 1e-3, 100000)
    assert status == kernels.STATUS_OK
    np.testing.assert_allclose(ys[:, 0], 1j * xs, atol=1e-10)
    np.testing.assert_allclose(ys[:, 1], 0.5j * xs**2, atol=1e-10)


def test_riccati_backward_direction():
    n, xs, ys, _, status = kernels.dopri5_riccati(UCOEF, 1.0, 1.0, 0.0, 0j, 0j, -2.0,
                                                  1e-12, 1e-14, 1e-3, 100000)
    assert status == kernels.STATUS_OK and xs[-1] == -2.0
    np.testing.assert_allclose(ys[:, 0], 1j * xs, atol=1e-10)


def test_dense_output_matches_nodes_and_derivative():
    n, xs, ys, dense, _ = kernels.dopri5_riccati(UCOEF, 1.0, 1.0, 0.0, 0j, 0j, 3.0,
                                                 1e-12, 1e-14, 1e-3, 100000)
    xq = np.linspace(0.0, 3.0, 777)
    val, der = kernels.dense_eval(xs, dense, xq)
    np.testing.assert_allclose(val[:, 0], 1j * xq, atol=1e-9)
    np.testing.assert_allclose(der[:, 0], 1j, atol=1e-8)
    np.testing.assert_allclose(der[:, 1], val[:, 0], atol=1e-8)


def test_max_steps_status():
    *_, status = kernels.dopri5_riccati(UCOEF, 1.0, 1.0, 0.0, 1 + 0j, 0j, 3.0,
                                        1e-12, 1e-14, 1e-3, 3)
    assert status == kernels.STATUS_MAX_STEPS


def test_numerov_reproduces_sine():
    x = np.linspace(0, 10, 10001)
    h = x[1] - x[0]
    psi = kernels.numerov_sweep(np.full(x.size, 4.0), h, 0.0, np.sin(2 * h))
    np.testing.assert_allclose(psi, np.sin(2 * x), atol=1e-9)


def test_count_sign_changes():
    psi = np.array([1.0, 0.0, -1.0, -2.0, 0.0, 3.0, 1.0, -1.0])
    assert kernels.count_sign_changes(psi, 0, psi.size) == 3
    assert kernels.count_sign_changes(psi, 3, 6) == 1


def test_poly_eval():
    assert kernels.poly_eval(np.array([1.0, -2.0, 3.0]), 2.0) == pytest.approx(9.0)


@pytest.mark.skipif(BACKEND != "numba", reason="numba unavailable")
def test_compiled_and_python_kernels_agree():
    r_fast = _riccati(kernels.dopri5_riccati)
    r_slow = _riccati(python_impl(kernels.dopri5_riccati))
    assert r_fast[0] == r_slow[0]
    np.testing.assert_allclose(r_fast[2], r_slow[2], rtol=1e-13, atol=1e-15)
    n, xs, _, dense, _ = r_fast
    xq = np.linspace(0.0, 3.5, 301)
    np.testing.assert_allclose(kernels.dense_eval(xs, dense, xq)[0],
                               python_impl(kernels.dense_eval)(xs, dense, xq)[0], rtol=1e-13)
    g = 1.0 - np.linspace(-6, 6, 2001) ** 2
    np.testing.assert_allclose(kernels.numerov_sweep(g, 0.006, 0.0, 1e-30),
                               python_impl(kernels.numerov_sweep)(g, 0.006, 0.0, 1e-30),
                               rtol=1e-13)


def test_pure_python_backend_end_to_end(ho, ho_ground):
    code = ("import qhj;"
            "m = qhj.PotentialModel.harmonic();"
            "s = qhj.find_turning_points(m, 1.0, m.default_window(1.0));"
            "q = qhj.solve_q_selfconsistent(m, s);"
            "print(qhj.BACKEND, repr(complex(q(0.5))))")
    env = dict(os.environ, QHJ_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True, timeout=300).stdout.split(maxsplit=1)
    assert out[0] == "numpy"
    assert abs(complex(out[1]) - complex(ho_ground[1](0.5))) < 1e-11


def test_bad_backend_rejected():
    env = dict(os.environ, QHJ_BACKEND="cuda")
    res = subprocess.run([sys.executable, "-c", "import qhj"], env=env, capture_output=True,
                         text=True, timeout=120)
    assert res.returncode != 0 and "QHJ_BACKEND" in res.stderr
