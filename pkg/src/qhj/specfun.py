"""Special functions: Airy functions, the gamma function and the upper
incomplete gamma function of complex argument.

Airy functions and the complete gamma function are thin validated wrappers
around :func:`scipy.special.airy` and :func:`math.gamma`. The incomplete
gamma function is implemented here because its branch must be controlled:
``z**a`` always uses the principal branch, ``arg z in (-pi, pi]``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy import special as _sp

from .errors import BranchCutAmbiguity, DomainError
from .quadrature import SEMI_INFINITE, integrate_intervals

AIRY_MAX_ABS_X = 50.0


def _airy_arg(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Airy argument must be finite")
    if np.any(np.abs(x) > AIRY_MAX_ABS_X):
        raise DomainError(f"Airy argument outside |x| <= {AIRY_MAX_ABS_X}")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def airy(x):
    """Return ``(Ai, Ai', Bi, Bi')`` at real ``x`` with ``|x| <= 50``."""
    ai, aip, bi, bip = _sp.airy(_airy_arg(x))
    return _out(ai), _out(aip), _out(bi), _out(bip)


def airy_ai(x):
    return airy(x)[0]


def airy_ai_prime(x):
    return airy(x)[1]


def airy_bi(x):
    return airy(x)[2]


def airy_bi_prime(x):
    return airy(x)[3]


def gamma(a: float) -> float:
    """Complete gamma function for ``a > 0``."""
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"gamma requires a > 0, got {a}")
    return math.gamma(a)


_EPS = 1e-16
_TINY = 1e-300


def _lower_series(a: float, z: complex, max_terms: int = 500) -> complex:
    """Lower incomplete gamma ``gamma(a, z)`` by its power series."""
    term = 1.0 / a
    total = term
    for n in range(1, max_terms):
        term *= z / (a + n)
        total += term
        if abs(term) < _EPS * abs(total):
            break
    return cmath.exp(a * cmath.log(z) - z) * total


def _lower_kummer(a: float, z: complex, max_terms: int = 5000) -> complex:
    """``gamma(a, z) = z^a sum_n (-z)^n / (n! (a + n))``.

    All terms share the phase of ``(-z)^n``, so the sum is free of
    cancellation when ``z`` is close to the negative real axis.
    """
    w = -z
    term = 1.0 + 0j
    total = term / a
    for n in range(1, max_terms):
        term *= w / n
        inc = term / (a + n)
        total += inc
        if abs(inc) < _EPS * abs(total) and n > abs(w):
            break
    return cmath.exp(a * cmath.log(z)) * total


def _upper_cf(a: float, z: complex, max_iter: int = 20000):
    """Upper incomplete gamma by the modified Lentz continued fraction.

    Returns ``None`` if the fraction has not converged.
    """
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return cmath.exp(a * cmath.log(z) - z) * h
    return None


def _upper_ray(a: float, z: complex) -> complex:
    """``e^{-z} int_0^inf (z + t)^{a-1} e^{-t} dt`` along the horizontal ray."""
    f = lambda t, _o: np.exp((a - 1.0) * np.log(z + t) - t)
    val = integrate_intervals(f, [0.0], [0.0], [SEMI_INFINITE], atol=1e-15, rtol=1e-13)[0]
    return cmath.exp(-z) * complex(val)


def inc_gamma_upper(a: float, z) -> complex:
    """Upper incomplete gamma ``Gamma(a, z) = int_z^inf t^{a-1} e^{-t} dt``.

    Parameters
    ----------
    a : float
        Order, ``a > 0`` (validated to 1e-8 relative accuracy for ``a <= 2``).
    z : complex
        Argument with ``|z| <= 1e4``. The principal branch of ``z**a`` is
        used, so the function is analytic off the negative real axis.

    Returns
    -------
    complex

    Raises
    ------
    DomainError
        For ``a <= 0``, non-finite or too large ``z``.
    BranchCutAmbiguity
        If ``z`` lies on the negative real axis.

    Notes
    -----
    ``|z| < a + 1`` uses ``Gamma(a) - gamma(a, z)`` with the power series of
    the lower function. Close to the negative real axis, where
    ``|z| + Re z`` is small, the lower function is summed in Kummer-transformed
    form instead, which has no cancellation there. Everywhere else a modified
    Lentz continued fraction is used, with a quadrature along the horizontal
    ray ``z + t`` as a fallback if the fraction does not converge.
    """
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"inc_gamma_upper requires a > 0, got {a}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("inc_gamma_upper argument must be finite")
    if abs(z) > 1e4:
        raise DomainError("inc_gamma_upper requires |z| <= 1e4")
    if z == 0:
        return complex(gamma(a))
    if z.imag == 0.0 and z.real < 0.0:
        raise BranchCutAmbiguity(f"z = {z} lies on the branch cut of z**a")
    try:
        if abs(z) < a + 1.0:
            return gamma(a) - _lower_series(a, z)
        if abs(z) + z.real < 10.0:
            return gamma(a) - _lower_kummer(a, z)
        val = _upper_cf(a, z)
        if val is None:
            val = _upper_ray(a, z)
    except OverflowError as exc:
        raise DomainError(f"Gamma({a}, {z}) overflows double precision") from exc
    return val
