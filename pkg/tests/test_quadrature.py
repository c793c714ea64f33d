import math

import numpy as np
import pytest

from qhj.errors import QuadratureFailure
from qhj.quadrature import (LINEAR, SEMI_INFINITE, SQRT_BOTH, SQRT_LEFT, SQRT_RIGHT,
                            integrate, integrate_intervals)


def test_polynomial_exact():
    assert integrate(lambda y: y**6, 0.0, 2.0) == pytest.approx(2.0**7 / 7, rel=1e-14)


@pytest.mark.parametrize("mode", [SQRT_LEFT, SQRT_BOTH])
def test_inverse_sqrt_left(mode):
    assert integrate(lambda y: 1 / np.sqrt(y), 0.0, 1.0, mode) == pytest.approx(2.0, rel=1e-12)


def test_inverse_sqrt_right():
    val = integrate(lambda y: 1 / np.sqrt(1 - y), 0.0, 1.0, SQRT_RIGHT)
    assert val == pytest.approx(2.0, rel=1e-12)


def test_semi_infinite():
    assert integrate(lambda y: np.exp(-y), 0.0, 0.0, SEMI_INFINITE) == pytest.approx(1.0, rel=1e-12)


def test_oscillatory_complex():
    w = 40.0
    val = integrate(lambda y: np.exp(1j * w * y), 0.0, 1.0, LINEAR)
    assert val == pytest.approx((np.exp(1j * w) - 1) / (1j * w), rel=1e-12)


def test_vectorised_intervals_and_owner():
    a = np.array([0.0, 1.0, 2.0])
    b = a + 1.0
    scale = np.array([1.0, 2.0, 3.0])
    val = integrate_intervals(lambda y, o: scale[o][:, None] * y, a, b)
    np.testing.assert_allclose(val, scale * (b**2 - a**2) / 2, rtol=1e-14)


def test_error_estimate_returned():
    val, err = integrate(np.cos, 0.0, math.pi / 2, return_error=True)
    assert val == pytest.approx(1.0, rel=1e-14)
    assert err < 1e-10


def test_failure_raises():
    with pytest.raises(QuadratureFailure):
        integrate(lambda y: np.sign(y - 0.3141), 0.0, 1.0, atol=1e-300, rtol=0.0, max_depth=5)
