import numpy as np
import pytest

from qhj import ComplexField, ConfigError, Direction, OutOfRange, RealField, zero_field


def _field():
    x = np.linspace(0, 2, 41)
    v = np.exp(1j * x) * (1 + x)
    return ComplexField(x, v, Direction.LTR, 1.0)


def test_nodes_are_exact_and_interpolation_is_accurate():
    f = _field()
    np.testing.assert_array_equal(f(f.grid), f.values)
    xq = np.linspace(0.01, 1.99, 57)
    np.testing.assert_allclose(f(xq), np.exp(1j * xq) * (1 + xq), atol=1e-5)


def test_hermite_paths_are_more_accurate():
    x = np.linspace(0, 2, 11)
    y, dy, d2y = np.exp(1j * x), 1j * np.exp(1j * x), -np.exp(1j * x)
    cubic = ComplexField(x, y, "ltr", 1.0, smooth_derivative=dy)
    quintic = ComplexField(x, y, "ltr", 1.0, smooth_derivative=dy, smooth_second_derivative=d2y)
    xq = np.linspace(0.05, 1.95, 77)
    e3 = np.max(abs(cubic(xq) - np.exp(1j * xq)))
    e5 = np.max(abs(quintic(xq) - np.exp(1j * xq)))
    assert e5 < e3 / 50
    np.testing.assert_allclose(quintic.smooth_prime(xq), 1j * np.exp(1j * xq), atol=1e-6)


def test_primitive_keeps_node_values():
    x = np.linspace(0, 1, 21)
    y = x**2 + 0j
    prim = x**3 / 3 + 5.0
    f = ComplexField(x, y, "ltr", 1.0, smooth_derivative=2 * x, primitive_values=prim)
    np.testing.assert_allclose(f.primitive(x), prim, atol=1e-15)
    assert f.integral(0.2, 0.7) == pytest.approx((0.7**3 - 0.2**3) / 3, abs=1e-10)


def test_out_of_range():
    f = _field()
    with pytest.raises(OutOfRange):
        f(2.1)
    with pytest.raises(OutOfRange):
        f.integral(-1, 1)


def test_validation():
    with pytest.raises(ConfigError):
        ComplexField(np.array([0.0, 0.0, 1.0]), np.zeros(3), "ltr", 1.0)
    with pytest.raises(ConfigError):
        ComplexField(np.array([0.0, 1.0]), np.zeros(3), "ltr", 1.0)
    with pytest.raises(ConfigError):
        ComplexField(np.array([0.0, 1.0]), np.zeros(2), "ltr", 1.0, momentum_offset=True)


def test_direction_conversion_conjugates_total_momentum(ho, ho_ground):
    shell, q = ho_ground
    r = q.with_direction(Direction.RTL)
    assert r.direction is Direction.RTL
    xs = np.linspace(-2.5, 2.5, 31)
    np.testing.assert_allclose(r.smooth(xs), np.conj(q.smooth(xs)), atol=1e-14)
    back = r.with_direction("ltr")
    np.testing.assert_allclose(back(xs), q(xs), atol=1e-14)


def test_direction_conversion_rejects_generic_field():
    with pytest.raises(ConfigError):
        _field().with_direction(Direction.RTL)


def test_zero_field(ho):
    z = zero_field(ho, 1.0, np.linspace(-1, 1, 5))
    assert np.all(z(np.linspace(-1, 1, 9)) == 0)
    assert z.with_direction("rtl").direction is Direction.RTL


def test_restrict():
    f = _field().restrict(0.5, 1.5)
    assert f.grid[0] >= 0.5 and f.grid[-1] <= 1.5


def test_real_field():
    x = np.linspace(0, 1, 11)
    r = RealField(x, x**2)
    assert r(0.5) == pytest.approx(0.25, abs=1e-12)
    exact = RealField(x, x**2, func=lambda t: t**2)
    assert exact(0.33) == 0.33**2
    with pytest.raises(OutOfRange):
        r(1.5)
