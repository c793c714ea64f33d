"""Potential models and purely classical quantities.

Scaled units are used throughout: the stationary equation reads
``hbar^2 psi'' + p(x)^2 psi = 0`` with ``p(x)^2 = k^2 - U(x)``, the mass is 1
and the energy is ``E = k^2 / 2``. ``hbar`` only enters as the semiclassical
parameter; ``k`` is held fixed when it is varied.

In classically forbidden regions ``p = +i|p|`` (principal square root of
``k^2 - U``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .errors import ConfigError, NoTurningPoint, RootNotConverged
from .quadrature import LINEAR, SQRT_BOTH, SQRT_LEFT, SQRT_RIGHT, integrate_intervals

TOL_ROOT = 1e-12
N_SCAN = 2048


class PotentialKind(str, Enum):
    LINEAR = "linear"
    HARMONIC = "harmonic"
    POLYNOMIAL = "poly"


@dataclass(frozen=True)
class PotentialModel:
    """A one-dimensional polynomial potential in scaled units.

    Parameters
    ----------
    kind : PotentialKind
        ``LINEAR`` with ``params = (f,)`` and ``U(x) = -f x``;
        ``HARMONIC`` with ``params = (omega,)`` and ``U(x) = omega^2 x^2``;
        ``POLYNOMIAL`` with ascending coefficients ``U(x) = sum c_j x^j``.
    params : tuple of float
        Model parameters as above.
    hbar : float
        Semiclassical parameter, default 1.
    """

    kind: PotentialKind
    params: tuple[float, ...]
    hbar: float = 1.0
    coefficients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = PotentialKind(self.kind)
        object.__setattr__(self, "kind", kind)
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ConfigError(f"hbar must be finite and positive, got {self.hbar}")
        if not params or not all(math.isfinite(v) for v in params):
            raise ConfigError("potential parameters must be finite and non-empty")
        if kind is PotentialKind.LINEAR:
            if len(params) != 1 or params[0] == 0.0:
                raise ConfigError("linear potential needs one nonzero slope f")
            coeffs = np.array([0.0, -params[0]])
        elif kind is PotentialKind.HARMONIC:
            if len(params) != 1 or params[0] <= 0.0:
                raise ConfigError("harmonic potential needs one positive frequency omega")
            coeffs = np.array([0.0, 0.0, params[0] ** 2])
        else:
            coeffs = np.trim_zeros(np.array(params, dtype=float), "b")
            if coeffs.size == 0:
                coeffs = np.zeros(1)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    # -- constructors -------------------------------------------------------
    @classmethod
    def linear(cls, f: float = 1.0, hbar: float = 1.0) -> "PotentialModel":
        return cls(PotentialKind.LINEAR, (f,), hbar)

    @classmethod
    def harmonic(cls, omega: float = 1.0, hbar: float = 1.0) -> "PotentialModel":
        return cls(PotentialKind.HARMONIC, (omega,), hbar)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], hbar: float = 1.0) -> "PotentialModel":
        return cls(PotentialKind.POLYNOMIAL, tuple(coeffs), hbar)

    def with_hbar(self, hbar: float) -> "PotentialModel":
        return PotentialModel(self.kind, self.params, hbar)

    # -- potential ------------------------------------------------------------
    @property
    def is_constant(self) -> bool:
        return self.coefficients.size <= 1

    @property
    def slope(self) -> float:
        """Slope ``f`` of the linear model."""
        return self.params[0]

    @property
    def omega(self) -> float:
        return self.params[0]

    def U(self, x, deriv: int = 0):
        """Potential or its ``deriv``-th derivative."""
        c = self.coefficients
        if deriv:
            c = npoly.polyder(c, deriv) if c.size > deriv else np.zeros(1)
        return npoly.polyval(np.asarray(x, dtype=float), c)

    def momentum_sq(self, k: float, x):
        """``p^2 = k^2 - U(x)``; factored for the harmonic model so that it is
        exactly zero at ``x = ±k/omega`` when that product is exact."""
        x = np.asarray(x, dtype=float)
        if self.kind is PotentialKind.HARMONIC:
            w = self.omega
            return (k - w * x) * (k + w * x)
        if self.kind is PotentialKind.LINEAR:
            return k * k + self.slope * x
        return k * k - self.U(x)

    def default_window(self, k: float) -> tuple[float, float]:
        """A scan window that contains the turning points with some margin."""
        if self.kind is PotentialKind.LINEAR:
            f = self.slope
            xt = -k * k / f
            ell = (self.hbar**2 / abs(f)) ** (1.0 / 3.0)
            lo, hi = xt - 6.0 * ell, xt + 12.0 * ell
            return (lo, hi) if f > 0 else (xt - 12.0 * ell, xt + 6.0 * ell)
        if self.kind is PotentialKind.HARMONIC:
            w = self.omega
            x2 = k / w
            margin = 2.5 * math.sqrt(self.hbar / w)
            return (-x2 - margin, x2 + margin)
        return (-10.0, 10.0)


@dataclass(frozen=True)
class EnergyShell:
    """Energy ``k`` with its turning points inside a scan window.

    Attributes
    ----------
    k : float
        Scaled wavenumber, ``E = k^2 / 2``.
    turning_points : tuple of float
        Ascending turning points in ``window`` (0, 1 or 2 entries are the
        supported regimes).
    period_T : float or None
        Classical period ``2 int dx/p`` for two-turning-point shells.
    window : tuple of float
        Scan window used for the search.
    x_min : float or None
        Position of the potential minimum between two turning points.
    """

    k: float
    turning_points: tuple[float, ...]
    period_T: float | None
    window: tuple[float, float]
    x_min: float | None = None

    @property
    def energy(self) -> float:
        return 0.5 * self.k * self.k

    @property
    def n_turning(self) -> int:
        return len(self.turning_points)

    def require_well(self) -> tuple[float, float]:
        """Return ``(x1, x2)`` or raise for shells that are not closed orbits."""
        if len(self.turning_points) != 2:
            raise NoTurningPoint(
                f"expected two turning points, found {len(self.turning_points)}"
            )
        return self.turning_points[0], self.turning_points[1]


# -- momentum ------------------------------------------------------------------
def classical_momentum(model: PotentialModel, k: float, x):
    """Classical momentum ``p(x) = sqrt(k^2 - U(x))``.

    Returns a complex value (array for array input): real in the classical
    region and ``+i|p|`` in forbidden regions.
    """
    F = np.asarray(model.momentum_sq(k, x), dtype=complex)
    p = np.sqrt(F)
    return p if p.ndim else complex(p)


def momentum_derivatives(model: PotentialModel, k: float, x, order: int = 3):
    """``(p, p', p'', ...)`` up to ``order`` from exact polynomial derivatives.

    Singular at turning points.
    """
    x = np.asarray(x, dtype=float)
    F = np.asarray(model.momentum_sq(k, x), dtype=complex)
    p = np.sqrt(F)
    out = [p]
    if order >= 1:
        F1 = -model.U(x, 1)
        out.append(F1 / (2 * p))
    if order >= 2:
        F2 = -model.U(x, 2)
        out.append(F2 / (2 * p) - F1**2 / (4 * p**3))
    if order >= 3:
        F3 = -model.U(x, 3)
        out.append(F3 / (2 * p) - 3 * F1 * F2 / (4 * p**3) + 3 * F1**3 / (8 * p**5))
    if order >= 4:
        raise ValueError("order > 3 is not supported")
    return tuple(out)


# -- turning points -------------------------------------------------------------
def _sign_change_roots(model, k, lo, hi, n_scan=N_SCAN, tol=TOL_ROOT):
    xs = np.linspace(lo, hi, n_scan + 1)
    F = model.momentum_sq(k, xs)
    roots = []
    for i in range(n_scan):
        fa, fb = F[i], F[i + 1]
        if fa == 0.0:
            roots.append(xs[i])
            continue
        if fa * fb < 0.0:
            try:
                r = brentq(lambda y: float(model.momentum_sq(k, y)), xs[i], xs[i + 1],
                           xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
            except RuntimeError as exc:  # pragma: no cover - brentq rarely fails
                raise RootNotConverged(str(exc)) from exc
            roots.append(r)
    if F[-1] == 0.0:
        roots.append(xs[-1])
    return sorted(set(roots))


def turning_points_in(model: PotentialModel, k: float, lo: float, hi: float) -> list[float]:
    """All turning points in ``[lo, hi]``; analytic for the built-in models."""
    if model.kind is PotentialKind.LINEAR:
        xt = -k * k / model.slope
        return [xt] if lo <= xt <= hi else []
    if model.kind is PotentialKind.HARMONIC:
        x2 = k / model.omega
        return [x for x in (-x2, x2) if lo <= x <= hi]
    if model.is_constant:
        return []
    return _sign_change_roots(model, k, lo, hi)


def potential_minimum(model: PotentialModel, lo: float, hi: float) -> float | None:
    """Lowest local minimum of ``U`` strictly inside ``(lo, hi)``."""
    if model.kind is PotentialKind.HARMONIC:
        return 0.0 if lo < 0.0 < hi else None
    c1 = npoly.polyder(model.coefficients) if model.coefficients.size > 1 else np.zeros(1)
    if not np.any(c1):
        return None
    crit = npoly.polyroots(c1)
    crit = np.real(crit[np.abs(np.imag(crit)) < 1e-10])
    crit = crit[(crit > lo) & (crit < hi)]
    crit = crit[model.U(crit, 2) > 0]
    if crit.size == 0:
        return None
    return float(crit[np.argmin(model.U(crit))])


def find_turning_points(model: PotentialModel, k: float, window=None) -> EnergyShell:
    """Locate the turning points of energy ``k`` in ``window``.

    Polynomial tables use a dense sign scan followed by bracketed root
    refinement to ``|dx| < 1e-12``. An empty list is a valid (free-like)
    shell. For two turning points the classical period and the potential
    minimum between them are filled in.
    """
    if not (math.isfinite(k) and k >= 0):
        raise ConfigError(f"k must be non-negative, got {k}")
    if window is None:
        window = model.default_window(k)
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ConfigError(f"empty window {window}")
    tps = tuple(turning_points_in(model, k, lo, hi))
    period = None
    x_min = None
    if len(tps) == 2:
        period = 2.0 * classical_time(model, k, tps[0], tps[1])
        x_min = potential_minimum(model, tps[0], tps[1])
    return EnergyShell(k=float(k), turning_points=tps, period_T=period,
                       window=(lo, hi), x_min=x_min)


# -- action and time -----------------------------------------------------------
def _harmonic_action(k, w, x):
    """Antiderivative of p for the oscillator with A(0) = 0, valid on all of R."""
    x = np.asarray(x, dtype=float)
    x2 = k / w
    ax = np.abs(x)
    out = np.empty(x.shape, dtype=complex)
    inside = ax <= x2
    xi = x[inside]
    pi_ = np.sqrt(np.maximum((k - w * xi) * (k + w * xi), 0.0))
    out[inside] = 0.5 * xi * pi_ + (k * k / (2 * w)) * np.arcsin(np.clip(w * xi / k, -1, 1))
    xo = ax[~inside]
    q = np.sqrt(np.maximum((w * xo - k) * (w * xo + k), 0.0))
    outer = (k * k * math.pi / (4 * w)) + 1j * (
        0.5 * xo * q - (k * k / (2 * w)) * np.log((w * xo + q) / k)
    )
    out[~inside] = np.sign(x[~inside]) * outer
    return out


def _linear_action(k, f, x):
    F = k * k + f * np.asarray(x, dtype=float)
    return (2.0 / (3.0 * f)) * F * np.sqrt(F.astype(complex))


def _poly_pieces(model, k, x_ref, xs):
    """Integrate p from x_ref to each x by quadrature, split at turning points."""
    lo = min(x_ref, float(np.min(xs)))
    hi = max(x_ref, float(np.max(xs)))
    roots = turning_points_in(model, k, lo, hi) if hi > lo else []
    nodes = np.array(sorted(set([x_ref] + list(roots))))

    def near_root(v):
        # endpoints on a turning point need the square-root map even when the
        # root sits on the scan boundary and was not bracketed
        v = np.asarray(v, dtype=float)
        F = np.abs(model.momentum_sq(k, v))
        hit = F <= 1e-9 * (1.0 + np.abs(model.U(v, 1)))
        return hit | np.array([any(abs(t - r) <= 4 * TOL_ROOT for r in roots)
                               for t in np.atleast_1d(v)]).reshape(v.shape)

    is_root = near_root(nodes)

    def modes(a_root, b_root):
        return np.where(a_root & b_root, SQRT_BOTH,
                        np.where(a_root, SQRT_LEFT, np.where(b_root, SQRT_RIGHT, LINEAR)))

    fp = lambda y, _o: np.sqrt(model.momentum_sq(k, y).astype(complex))
    # cumulative action at nodes, relative to x_ref
    iref = int(np.flatnonzero(nodes == x_ref)[0])
    A = np.zeros(nodes.size, dtype=complex)
    if nodes.size > 1:
        seg = integrate_intervals(fp, nodes[:-1], nodes[1:], modes(is_root[:-1], is_root[1:]),
                                  atol=1e-14, rtol=1e-13)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        A = cum - cum[iref]
    # each x: integrate from the nearest node towards x_ref side
    xs = np.asarray(xs, dtype=float)
    j = np.clip(np.searchsorted(nodes, xs, side="right") - 1, 0, nodes.size - 1)
    # for x left of x_ref, anchor at the node to its right
    left = xs < x_ref
    j = np.where(left, np.clip(np.searchsorted(nodes, xs, side="left"), 0, nodes.size - 1), j)
    anchor = nodes[j]
    a = np.minimum(anchor, xs)
    b = np.maximum(anchor, xs)
    x_is_root = near_root(xs)
    a_root = np.where(anchor <= xs, is_root[j], x_is_root)
    b_root = np.where(anchor <= xs, x_is_root, is_root[j])
    out = A[j].copy()
    nz = b > a
    if np.any(nz):
        v = integrate_intervals(fp, a[nz], b[nz], modes(a_root[nz], b_root[nz]),
                                atol=1e-14, rtol=1e-13)
        sign = np.where(anchor[nz] <= xs[nz], 1.0, -1.0)
        out[nz] += sign * v
    return out


def classical_action(model: PotentialModel, k: float, x_ref: float, x):
    """``s(x) = int_{x_ref}^{x} p(y) dy`` along the real axis.

    Analytic for the linear and harmonic models, adaptive quadrature with
    turning-point substitutions otherwise. Leftward integration through a
    forbidden region yields a negative imaginary part, as the literal
    integral of ``+i|p|`` requires.
    """
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if model.kind is PotentialKind.LINEAR:
        f = model.slope
        out = _linear_action(k, f, xs) - _linear_action(k, f, x_ref)
    elif model.kind is PotentialKind.HARMONIC:
        w = model.omega
        out = _harmonic_action(k, w, xs) - _harmonic_action(k, w, np.array(x_ref))
    elif model.is_constant:
        out = np.sqrt(complex(model.momentum_sq(k, 0.0))) * (xs - x_ref)
    else:
        out = _poly_pieces(model, k, float(x_ref), xs)
    out = np.asarray(out, dtype=complex)
    out[xs == x_ref] = 0.0
    return complex(out[0]) if scalar else out


def _momentum_sq_coeffs(model: PotentialModel, k: float) -> np.ndarray:
    """Ascending coefficients of ``p^2 = k^2 - U``."""
    c = -np.array(model.coefficients, dtype=float)
    c[0] += k * k
    return c


def _bounding_roots(c: np.ndarray, lo: float, hi: float):
    """Real roots of ``c`` closest to ``[lo, hi]`` from outside (or None)."""
    if c.size < 2:
        return None, None
    r = npoly.polyroots(c)
    r = np.real(r[np.abs(np.imag(r)) <= 1e-8 * (1.0 + np.abs(r))])
    dc = npoly.polyder(c)
    for _ in range(3):  # Newton polish
        d = npoly.polyval(r, dc)
        r = np.where(d != 0, r - npoly.polyval(r, c) / np.where(d != 0, d, 1.0), r)
    tol = 1e-9 * (1.0 + abs(lo) + abs(hi))
    left = r[r <= lo + tol]
    right = r[r >= hi - tol]
    r1 = float(left.max()) if left.size else None
    r2 = float(right.min()) if right.size else None
    return r1, r2


def classical_time(model: PotentialModel, k: float, a: float, b: float) -> float:
    """Classical travel time ``int_a^b dx / p`` inside the allowed region.

    Endpoints may be turning points. With the bounding turning points
    ``x1 < x2`` of the allowed interval, ``p^2 = (x - x1)(x2 - x) H(x)`` with a
    polynomial ``H`` and the substitution ``x = m - w cos(theta)`` turns the
    integrand into the smooth ``1 / sqrt(H)``; a single bounding turning point
    ``x_t`` uses ``x = x_t +- u^2`` in the same way.
    """
    if a == b:
        return 0.0
    sgn = 1.0
    if b < a:
        a, b, sgn = b, a, -1.0
    c = _momentum_sq_coeffs(model, k)
    r1, r2 = _bounding_roots(c, a, b)
    desc = c[::-1]
    opts = dict(atol=1e-13, rtol=1e-13)
    if r1 is not None and r2 is not None:
        H = np.polydiv(desc, -np.poly([r1, r2]))[0]
        m, w = 0.5 * (r1 + r2), 0.5 * (r2 - r1)
        ta = math.acos(min(1.0, max(-1.0, (m - a) / w)))
        tb = math.acos(min(1.0, max(-1.0, (m - b) / w)))
        f = lambda th, _o: 1.0 / np.sqrt(np.maximum(np.polyval(H, m - w * np.cos(th)), 1e-300))
        val = integrate_intervals(f, [ta], [tb], [LINEAR], **opts)[0]
    elif r1 is not None or r2 is not None:
        left = r1 is not None
        r = r1 if left else r2
        G = np.polydiv(desc, np.poly([r]) * (1.0 if left else -1.0))[0]
        ua = math.sqrt(max(a - r, 0.0)) if left else math.sqrt(max(r - b, 0.0))
        ub = math.sqrt(max(b - r, 0.0)) if left else math.sqrt(max(r - a, 0.0))
        y = (lambda u: r + u * u) if left else (lambda u: r - u * u)
        f = lambda u, _o: 2.0 / np.sqrt(np.maximum(np.polyval(G, y(u)), 1e-300))
        val = integrate_intervals(f, [ua], [ub], [LINEAR], **opts)[0]
    else:
        f = lambda y, _o: 1.0 / np.sqrt(np.maximum(model.momentum_sq(k, y), 1e-300))
        val = integrate_intervals(f, [a], [b], [LINEAR], **opts)[0]
    return sgn * float(val)
