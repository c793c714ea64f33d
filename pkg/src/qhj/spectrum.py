"""Soft-boundary connection problem: reflection phases, quantization curve,
Maslov index and eigenvalues.

Conventions. ``P = p + Q`` is the left-to-right total momentum. At a turning
point ``x_t`` the wave function inside the well is matched to the decaying
solution outside, whose total momentum ``P_out`` is purely imaginary;
``kappa = |Im P_out(x_t)|`` is its logarithmic decay rate (times ``hbar``).
The gauge-invariant reflection phases are

    phi_right = 2 atan2(kappa_2 - Im Q(x2), Re Q(x2)),
    phi_left  = 2 atan2(kappa_1 + Im Q(x1), Re Q(x1)),

both folded to ``(-pi, pi]``; a symmetric well gives ``phi_right == phi_left``.
The quantization curve and the Maslov curve are

    quant   = (1/pi) [ int_{x1}^{x2} Re P / hbar - (phi_right + phi_left) / 2 ],
    mu / 4  = (1/pi) [ (phi_right + phi_left) / 2 - int_{x1}^{x2} Re Q / hbar ],

so that ``quant + mu/4 = int p / (pi hbar)`` (Bohr-Sommerfeld form).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DegenerateMatch, DirectionMismatch, NoRootInGrid, OutOfRange
from .fields import ComplexField, Direction
from .potential import EnergyShell, PotentialModel, classical_action, find_turning_points
from .qcf import (ATOL, RTOL, DECAY_ACTION, _march_to_action, integrate_momentum, solve_momentum,
                  wkb_seed)

MATCHING_MODES = ("full", "imag")
DEGENERATE_TOL = 1e-12


def fold_phase(phi):
    """Fold angles to ``(-pi, pi]``."""
    phi = np.asarray(phi, dtype=float)
    out = np.pi - np.mod(np.pi - phi, 2 * np.pi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ReflectionPhase:
    """Reflection phase at one turning point.

    ``direction`` is ``LTR`` for the phase picked up at the right turning
    point and ``RTL`` for the left one. ``phi_gauge`` depends on the reference
    point ``x_ref`` used to accumulate the wave phase; ``phi_total`` is what a
    wave anchored at ``x_ref`` must use.
    """

    direction: Direction
    phi_invariant: float
    phi_gauge: float
    x_ref: float
    energy_k: float

    @property
    def phi_total(self) -> float:
        return self.phi_invariant + self.phi_gauge


def _kappa(P_out_at_tp: complex, matching: str) -> float:
    if matching == "full":
        return abs(P_out_at_tp)
    if matching == "imag":
        return abs(P_out_at_tp.imag)
    raise ConfigError(f"matching must be one of {MATCHING_MODES}")


def invariant_phase(Q_t: complex, kappa: float, side: str) -> float:
    """Gauge-invariant phase from the boundary match at a turning point.

    ``Q_t`` is the left-to-right correction at the turning point, ``side``
    the side of the forbidden region (``"right"`` for ``x2``).
    """
    if abs(Q_t.real) < DEGENERATE_TOL:
        raise DegenerateMatch(f"Re Q(x_t) = {Q_t.real:.3e} vanishes")
    if side == "right":
        return fold_phase(2.0 * math.atan2(kappa - Q_t.imag, Q_t.real))
    return fold_phase(2.0 * math.atan2(kappa + Q_t.imag, Q_t.real))


def reflection_phase(q2: ComplexField, q_outer: ComplexField, shell: EnergyShell,
                     direction: Direction | None = None, x_ref: float | None = None,
                     matching: str = "full") -> ReflectionPhase:
    """Reflection phase at the turning point bordering ``q_outer``'s region.

    Parameters
    ----------
    q2 : ComplexField
        Correction inside the well (either direction), containing ``x_t``.
    q_outer : ComplexField
        Decaying forbidden-region field from :func:`qhj.qcf.decaying_field`.
    shell : EnergyShell
    direction : Direction, optional
        ``LTR`` (right turning point) or ``RTL`` (left turning point); inferred
        from ``q_outer`` if omitted.
    x_ref : float, optional
        Gauge reference; defaults to the opposite turning point, or to ``x_t``
        itself for one-turning-point shells (zero gauge part).
    matching : {"full", "imag"}
        Use ``|P_out(x_t)|`` or ``|Im P_out(x_t)|`` as decay rate.

    Raises
    ------
    DegenerateMatch
        If ``|Re Q(x_t)| < 1e-12``.
    """
    side = q_outer.meta.get("side")
    if side not in ("left", "right"):
        raise ConfigError("q_outer must come from decaying_field")
    expected = Direction.LTR if side == "right" else Direction.RTL
    if direction is not None and Direction(direction) is not expected:
        raise DirectionMismatch(
            f"the {side} turning point belongs to direction {expected.value}")
    x_t = float(q_outer.meta["x_t"])
    q = q2.with_direction(Direction.LTR)
    Q_t = complex(q(x_t))
    P_out = complex(q_outer.smooth(x_t))
    kappa = _kappa(P_out, matching)
    phi_inv = invariant_phase(Q_t, kappa, side)
    hbar = q.hbar
    tps = shell.turning_points
    if x_ref is None:
        x_ref = (tps[0] if side == "right" else tps[-1]) if len(tps) == 2 else x_t
    if side == "right":
        gauge = -2.0 * q.integral(x_ref, x_t).real / hbar
    else:
        gauge = -2.0 * q.integral(x_t, x_ref).real / hbar
    return ReflectionPhase(expected, phi_inv, float(gauge), float(x_ref), shell.k)


# -- per-energy well data ----------------------------------------------------------------
@dataclass(frozen=True)
class WellSample:
    """Boundary data of one energy used by the quantization curve."""

    k: float
    x1: float
    x2: float
    Q1: complex
    Q2: complex
    kappa1: float
    kappa2: float
    action_P: float  # int_{x1}^{x2} Re P / hbar
    action_p: float  # int_{x1}^{x2} p / hbar
    phi_right: float
    phi_left: float


def outer_momentum(model: PotentialModel, shell: EnergyShell, side: str,
                   decay: float = DECAY_ACTION) -> complex:
    """``P_out`` of the decaying solution at the turning point on ``side``."""
    k = shell.k
    x_t = shell.turning_points[-1] if side == "right" else shell.turning_points[0]
    d = 1 if side == "right" else -1
    x_f = _march_to_action(model, k, x_t, d, decay * model.hbar, imaginary=True)
    sol = integrate_momentum(model, k, x_f, wkb_seed(model, k, x_f, sigma=d), (x_t,), RTOL, ATOL)
    return complex(sol.eval(x_t)[0][0])


def well_sample(model: PotentialModel, shell: EnergyShell, matching: str = "full") -> WellSample:
    """Reflection phases and action integrals at one energy (no grid needed)."""
    x1, x2 = shell.require_well()
    hbar = model.hbar
    sol = solve_momentum(model, shell, (x1, x2))
    P, _, W = sol.eval(np.array([x1, x2]))
    k1 = _kappa(outer_momentum(model, shell, "left"), matching)
    k2 = _kappa(outer_momentum(model, shell, "right"), matching)
    # p vanishes at the turning points, so Q = P there
    Q1, Q2 = complex(P[0]), complex(P[1])
    action_P = float((W[1] - W[0]).real) / hbar
    action_p = float(classical_action(model, shell.k, x1, x2).real) / hbar
    return WellSample(shell.k, x1, x2, Q1, Q2, k1, k2, action_P, action_p,
                      invariant_phase(Q2, k2, "right"), invariant_phase(Q1, k1, "left"))


# -- spectrum --------------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Quantization curve samples, Maslov curve and eigenvalues.

    Attributes
    ----------
    k_grid : ndarray
    quant_curve : ndarray
        ``(1/pi)[int Re P/hbar - (phi_right + phi_left)/2]``.
    maslov_curve : ndarray
        ``mu / 4``.
    eigen_k : ndarray
        Refined roots of ``quant_curve = n``, ascending.
    labels : ndarray of int
        Quantum numbers ``n`` of ``eigen_k``.
    maslov_at_eigen : ndarray
        ``mu / 4`` evaluated directly at each ``eigen_k``.
    phi_right, phi_left : ndarray
        Unwrapped invariant phases on ``k_grid``.
    """

    k_grid: np.ndarray
    quant_curve: np.ndarray
    maslov_curve: np.ndarray
    eigen_k: np.ndarray
    labels: np.ndarray
    maslov_at_eigen: np.ndarray
    phi_right: np.ndarray
    phi_left: np.ndarray
    meta: dict = field(default_factory=dict)


def _shell(model, k, window):
    win = window if window is not None else model.default_window(k)
    shell = find_turning_points(model, k, win)
    if shell.n_turning != 2:
        raise ConfigError(f"k = {k} is outside the two-turning-point regime of the window")
    return shell


def _curves(samples, offset):
    phr = np.unwrap([s.phi_right for s in samples])
    phl = np.unwrap([s.phi_left for s in samples])
    aP = np.array([s.action_P for s in samples])
    ap = np.array([s.action_p for s in samples])
    half = 0.5 * (phr + phl)
    quant = (aP - half) / math.pi + offset
    maslov = (half - (aP - ap)) / math.pi - offset
    return quant, maslov, phr, phl


def quantization_curve(model: PotentialModel, k_grid, *, window=None, matching: str = "full",
                       workers: int | None = None, k_tol: float = 1e-8) -> SpectrumResult:
    """Sample the quantization curve on ``k_grid`` and bracket eigenvalues.

    The integer offset of the unwrapped phases is fixed so that the mean of
    ``mu/4`` over the grid lies closest to ``1/2``. Integer crossings of the
    curve are refined by bisection to ``|dk| < k_tol``. An empty eigenvalue
    list is a valid result.
    """
    if matching not in MATCHING_MODES:
        raise ConfigError(f"matching must be one of {MATCHING_MODES}")
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size < 2 or not np.all(np.diff(ks) > 0):
        raise ConfigError("k_grid must be strictly increasing with at least two points")

    def sample(k):
        return well_sample(model, _shell(model, k, window), matching)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(sample, ks))
    else:
        samples = [sample(k) for k in ks]

    quant, maslov, phr, phl = _curves(samples, 0)
    offset = -int(round(float(np.mean(maslov)) - 0.5))
    quant, maslov = quant + offset, maslov - offset

    def value_near(k, j):
        """Curve values at ``k`` unwrapped against grid sample ``j``."""
        s = sample(k)
        r = s.phi_right + 2 * math.pi * round((phr[j] - s.phi_right) / (2 * math.pi))
        l = s.phi_left + 2 * math.pi * round((phl[j] - s.phi_left) / (2 * math.pi))
        half = 0.5 * (r + l)
        q = (s.action_P - half) / math.pi + offset
        m = (half - (s.action_P - s.action_p)) / math.pi - offset
        return q, m

    eigen, labels, m_eig = [], [], []
    lo_n = int(math.floor(quant.min()))
    hi_n = int(math.ceil(quant.max()))
    for n in range(lo_n, hi_n + 1):
        g = quant - n
        for j in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0):
            if g[j] == 0 and j > 0 and g[j - 1] == 0:
                continue
            a, b = ks[j], ks[j + 1]
            ga = g[j]
            if ga == 0.0:
                b = a
            while b - a > k_tol:
                c = 0.5 * (a + b)
                gc = value_near(c, j)[0] - n
                if np.sign(gc) == np.sign(ga):
                    a, ga = c, gc
                else:
                    b = c
            k_root = 0.5 * (a + b)
            if eigen and abs(k_root - eigen[-1]) < 10 * k_tol and labels[-1] == n:
                continue
            eigen.append(k_root)
            labels.append(n)
            m_eig.append(value_near(k_root, j)[1])
    order = np.argsort(eigen)
    return SpectrumResult(ks, quant, maslov, np.asarray(eigen)[order],
                          np.asarray(labels, dtype=int)[order], np.asarray(m_eig)[order],
                          phr, phl, meta={"matching": matching, "offset": offset})


def find_eigenvalues(model: PotentialModel, k_lo: float, k_hi: float, n_grid: int = 400,
                     **kw) -> SpectrumResult:
    """:func:`quantization_curve` on a uniform grid; raises if no root is found.

    Raises
    ------
    NoRootInGrid
        If the window contains no integer crossing.
    """
    res = quantization_curve(model, np.linspace(k_lo, k_hi, n_grid), **kw)
    if res.eigen_k.size == 0:
        raise NoRootInGrid(f"no quantization crossing in k in [{k_lo}, {k_hi}]")
    return res


def maslov_index(result: SpectrumResult, k: float) -> float:
    """Interpolated Maslov index ``mu`` (four times the curve) at ``k``.

    Raises
    ------
    OutOfRange
        Outside the scanned hull.
    """
    ks = result.k_grid
    if not ks[0] <= k <= ks[-1]:
        raise OutOfRange(f"k = {k} outside [{ks[0]}, {ks[-1]}]")
    return 4.0 * float(CubicSpline(ks, result.maslov_curve)(k))
