import cmath
import math

import mpmath
import numpy as np
import pytest

from qhj import specfun
from qhj.errors import BranchCutAmbiguity, DomainError

mpmath.mp.dps = 30


@pytest.mark.parametrize("x", [-20.0, -7.3, -1.0, 0.0, 0.5, 2.0, 9.0])
def test_airy_against_mpmath(x):
    ai, aip, bi, bip = specfun.airy(x)
    assert ai == pytest.approx(float(mpmath.airyai(x)), rel=1e-10, abs=1e-14)
    assert aip == pytest.approx(float(mpmath.airyai(x, derivative=1)), rel=1e-10, abs=1e-14)
    assert bi == pytest.approx(float(mpmath.airybi(x)), rel=1e-10)
    assert bip == pytest.approx(float(mpmath.airybi(x, derivative=1)), rel=1e-10)


def test_airy_wronskian():
    x = np.linspace(-30, 5, 200)
    ai, aip, bi, bip = specfun.airy(x)
    np.testing.assert_allclose(ai * bip - aip * bi, 1 / math.pi, rtol=1e-10)


def test_airy_domain():
    with pytest.raises(DomainError):
        specfun.airy_ai(60.0)
    with pytest.raises(DomainError):
        specfun.airy_ai(float("nan"))


def test_gamma():
    assert specfun.gamma(4.0 / 3.0) == pytest.approx(0.8929795115692492, rel=1e-15)
    with pytest.raises(DomainError):
        specfun.gamma(0.0)


ZS = [0.3, 2.0, 25.0, 0.5 + 0.5j, -2j, 3 - 4j, -0.8 + 0.01j, -5 - 1e-3j, -30j, 200j,
      -40 + 2j, 1e3 - 1e3j]


@pytest.mark.parametrize("a", [1.0 / 3.0, 0.5, 1.0, 1.7])
@pytest.mark.parametrize("z", ZS)
def test_inc_gamma_against_mpmath(a, z):
    ref = complex(mpmath.gammainc(a, z))
    val = specfun.inc_gamma_upper(a, z)
    assert abs(val - ref) <= 1e-8 * abs(ref) + 1e-300


def test_inc_gamma_one_is_exponential():
    for z in (0.1, 1 + 1j, -3j, 10.0):
        assert specfun.inc_gamma_upper(1.0, z) == pytest.approx(cmath.exp(-z), rel=1e-12)


def test_inc_gamma_at_zero_is_gamma():
    assert specfun.inc_gamma_upper(1.0 / 3.0, 0.0) == pytest.approx(math.gamma(1.0 / 3.0))


def test_inc_gamma_errors():
    with pytest.raises(BranchCutAmbiguity):
        specfun.inc_gamma_upper(1.0 / 3.0, -2.0)
    with pytest.raises(DomainError):
        specfun.inc_gamma_upper(-1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.inc_gamma_upper(0.5, 1e5)
