"""Quantum correction functions ``Q = P - p``.

Three routes are provided:

* the full correction from the complex Riccati equation for the total
  momentum, ``P' = -i (P^2 - p^2) / hbar``, integrated with an adaptive
  Dormand-Prince method (:func:`solve_q_selfconsistent`);
* the zeroth-order correction ``Q0(x) = e^{-2is/hbar} int_x^b p' e^{2is/hbar}``
  by adaptive Gauss-Kronrod quadrature (:func:`q0_quadrature`) and in closed
  form for the linear potential (:func:`q0_closed_form_linear`);
* successive substitution into the self-consistent integral formula
  (:func:`iterate_q_fixed_point`).

Start points: wells (two turning points) are integrated outwards from the
potential minimum, seeded with the third-order WKB value; potentials with one
turning point are integrated inwards from a point at least
``seed_wavelengths`` local wavelengths into the classical region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import (ConfigError, DomainError, NoTurningPoint, SeedRegionTooNarrow,
                     StiffnessFailure)
from .fields import ComplexField, Direction
from .potential import (EnergyShell, PotentialModel, classical_action, classical_momentum,
                        momentum_derivatives)
from .quadrature import LINEAR, SQRT_LEFT, SQRT_RIGHT, integrate_intervals
from .specfun import gamma, inc_gamma_upper

RTOL = 1e-12
ATOL = 1e-14
SEED_WAVELENGTHS = 15.0
FAR_WAVELENGTHS = 40.0
DECAY_ACTION = 20.0
MAX_STEPS = 2_000_000


# -- grids ------------------------------------------------------------------------
@dataclass(frozen=True)
class GridSpec:
    """Grid construction parameters.

    Attributes
    ----------
    window : (float, float), optional
        Grid range; defaults to the shell's scan window.
    points_per_wavelength : float
        Minimum number of points per local wavelength ``2 pi hbar / |p|``.
    max_step : float, optional
        Upper bound on the spacing; defaults to ``window_width / 400``.
    turning_point_step : float, optional
        Spacing at a turning point; defaults to 0.02 Airy lengths.
    extra_points : tuple of float
        Positions that must be grid nodes.
    """

    window: tuple[float, float] | None = None
    points_per_wavelength: float = 16.0
    max_step: float | None = None
    turning_point_step: float | None = None
    extra_points: tuple[float, ...] = ()


def airy_length(model: PotentialModel, x_t: float) -> float:
    """Local Airy length ``(hbar^2 / |U'(x_t)|)^(1/3)`` at a turning point."""
    slope = abs(float(model.U(x_t, 1)))
    if slope == 0.0:
        raise DomainError(f"degenerate turning point at x = {x_t}")
    return (model.hbar**2 / slope) ** (1.0 / 3.0)


def make_grid(model: PotentialModel, shell: EnergyShell, spec: GridSpec | None = None) -> np.ndarray:
    """Adaptive grid: wavelength-resolved, densified around turning points,
    and containing the turning points, the potential minimum and any extra
    points that fall inside the window."""
    spec = spec or GridSpec()
    lo, hi = spec.window if spec.window is not None else shell.window
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise ConfigError(f"empty grid window ({lo}, {hi})")
    k = shell.k
    hbar = model.hbar
    tps = [t for t in shell.turning_points if lo - 1e-12 <= t <= hi + 1e-12]
    h_max = spec.max_step if spec.max_step is not None else (hi - lo) / 400.0
    tp_scale = []
    for t in shell.turning_points:
        try:
            ell = airy_length(model, t)
        except DomainError:
            ell = (hi - lo) / 1000.0
        tp_scale.append((t, spec.turning_point_step or 0.02 * ell))
    ppw = float(spec.points_per_wavelength)
    k2 = k * k
    coeffs = model.coefficients
    pts = [lo]
    x = lo
    while x < hi:
        pabs = math.sqrt(abs(k2 - kernels.poly_eval(coeffs, x))) if coeffs.size > 1 else abs(k)
        h = h_max
        if pabs > 0.0:
            h = min(h, 2.0 * math.pi * hbar / (ppw * pabs))
        for t, h0 in tp_scale:
            h = min(h, h0 + 0.08 * abs(x - t))
        x = x + h
        pts.append(x)
    pts = np.array(pts)
    pts = pts[pts < hi]
    required = set([lo, hi] + tps)
    if shell.x_min is not None and lo < shell.x_min < hi:
        required.add(float(shell.x_min))
    required.update(float(e) for e in spec.extra_points if lo <= e <= hi)
    req = np.array(sorted(required))
    # drop generated points that nearly coincide with required ones
    if pts.size:
        d = np.min(np.abs(pts[:, None] - req[None, :]), axis=1)
        spacing = np.gradient(pts) if pts.size > 1 else np.array([h_max])
        pts = pts[d > 1e-3 * np.abs(spacing)]
    grid = np.unique(np.concatenate([pts, req]))
    return grid


# -- WKB terms ----------------------------------------------------------------------
def wkb_p1(model: PotentialModel, k: float, x):
    """First WKB term ``P1 = i p' / (2 p)``."""
    p, dp = momentum_derivatives(model, k, x, order=1)
    return 0.5j * dp / p


def wkb_p2(model: PotentialModel, k: float, x, sigma: int = 1):
    """Second WKB term ``P2 = sigma [-p''/(4 p^2) + 3 p'^2 / (8 p^3)]``.

    ``sigma = +1`` is the branch ``P ~ +p``; ``sigma = -1`` the branch
    ``P ~ -p``.
    """
    p, dp, d2p = momentum_derivatives(model, k, x, order=2)
    return sigma * (-d2p / (4 * p**2) + 3 * dp**2 / (8 * p**3))


def wkb_p3(model: PotentialModel, k: float, x):
    """Third WKB term, the same on both branches:
    ``P3 = i [-p3/(8 p^3) + 3 p1 p2/(4 p^4) - 3 p1^3/(4 p^5)]`` with
    ``pn`` the n-th derivative of ``p``."""
    p, dp, d2p, d3p = momentum_derivatives(model, k, x, order=3)
    return 1j * (-d3p / (8 * p**3) + 3 * dp * d2p / (4 * p**4) - 3 * dp**3 / (4 * p**5))


def wkb_seed(model: PotentialModel, k: float, x: float, sigma: int = 1) -> complex:
    """Third-order WKB total momentum
    ``sigma p + hbar P1 + hbar^2 P2 + hbar^3 P3`` at ``x``."""
    h = model.hbar
    p = complex(classical_momentum(model, k, x))
    return complex(sigma * p + h * wkb_p1(model, k, x) + h * h * wkb_p2(model, k, x, sigma)
                   + h**3 * wkb_p3(model, k, x))


@dataclass(frozen=True, eq=False)
class WkbTerms:
    """First- and second-order WKB terms sampled away from turning points."""

    P1: ComplexField
    P2: ComplexField


def wkb_terms(model: PotentialModel, shell: EnergyShell, guard_band: float,
              grid_spec: GridSpec | None = None) -> WkbTerms:
    """Sample ``P1`` and ``P2`` on a grid that excludes ``|x - x_t| < guard_band``."""
    if not guard_band > 0:
        raise ConfigError("guard_band must be positive")
    grid = make_grid(model, shell, grid_spec)
    keep = np.ones(grid.size, dtype=bool)
    for t in shell.turning_points:
        keep &= np.abs(grid - t) >= guard_band
    grid = grid[keep]
    k = shell.k
    P1 = ComplexField(grid, wkb_p1(model, k, grid), Direction.LTR, k, model, label="wkb1")
    P2 = ComplexField(grid, wkb_p2(model, k, grid), Direction.LTR, k, model, label="wkb2")
    return WkbTerms(P1, P2)


# -- start points ---------------------------------------------------------------------
def _classical_side(model, k, x_t):
    """+1 if the classical region lies to the right of ``x_t``, else -1."""
    ell = airy_length(model, x_t)
    right = float(model.momentum_sq(k, x_t + 1e-3 * ell))
    return 1 if right > 0 else -1


def _march_to_action(model, k, x_t, d, target, imaginary=False):
    """Point ``x = x_t + d L`` with ``|int_{x_t}^x p| = target`` along a region
    of fixed character (classical, or forbidden when ``imaginary``)."""
    ell = airy_length(model, x_t)

    def measure(L):
        x = x_t + d * L
        F = float(model.momentum_sq(k, x))
        if (F <= 0.0) != imaginary and F != 0.0:
            raise SeedRegionTooNarrow(
                f"region beyond x_t = {x_t} changes character at x = {x}")
        s = classical_action(model, k, x_t, x)
        return abs(s.imag if imaginary else s.real)

    L = ell
    for _ in range(200):
        if measure(L) >= target:
            break
        L *= 1.5
    else:  # pragma: no cover - unbounded growth is impossible for polynomials
        raise SeedRegionTooNarrow("could not reach the requested action")
    L0 = L / 1.5 if L > ell else 0.0
    Lr = brentq(lambda v: measure(v) - target, L0, L, xtol=1e-13, rtol=1e-13)
    return x_t + d * Lr


def seed_point(model: PotentialModel, shell: EnergyShell,
               seed_wavelengths: float = SEED_WAVELENGTHS) -> float:
    """Start position of the Riccati integration for ``shell``."""
    k = shell.k
    n = shell.n_turning
    if n == 0:
        lo, hi = shell.window
        x_s = 0.5 * (lo + hi)
        if float(model.momentum_sq(k, x_s)) <= 0.0:
            raise SeedRegionTooNarrow("no classical region in the window")
        return x_s
    if n == 1:
        x_t = shell.turning_points[0]
        d = _classical_side(model, k, x_t)
        target = 2.0 * math.pi * model.hbar * seed_wavelengths
        return _march_to_action(model, k, x_t, d, target)
    if n == 2:
        x1, x2 = shell.turning_points
        x_s = shell.x_min if shell.x_min is not None else 0.5 * (x1 + x2)
        if float(model.momentum_sq(k, x_s)) <= 0.0:
            raise ConfigError("the region between the turning points is forbidden "
                              "(barrier shells are not supported)")
        return x_s
    raise ConfigError(f"{n} turning points: multi-well shells are not supported")


# -- Riccati integration -----------------------------------------------------------------
class MomentumSolution:
    """Dense solution ``P(x)`` of the Riccati equation with ``W = int P``.

    ``W`` is anchored at the start point (``W(x_start) = 0``).
    """

    def __init__(self, model, k, x_start, P_start, segments):
        self.model = model
        self.k = k
        self.x_start = x_start
        self.P_start = P_start
        self.segments = segments  # list of (lo, hi, xs, dense)

    @property
    def hull(self):
        los = [s[0] for s in self.segments] or [self.x_start]
        his = [s[1] for s in self.segments] or [self.x_start]
        return min(los), max(his)

    def eval(self, x):
        """Return ``(P, P', W)`` at positions ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        P = np.empty(x.size, dtype=complex)
        dP = np.empty(x.size, dtype=complex)
        W = np.empty(x.size, dtype=complex)
        done = np.zeros(x.size, dtype=bool)
        if not self.segments:
            # zero-length solve: constant solution at the start point only
            P[:] = self.P_start
            dP[:] = -1j * (self.P_start**2 - self.model.momentum_sq(self.k, x)) / self.model.hbar
            W[:] = self.P_start * (x - self.x_start)
            return P, dP, W
        for lo, hi, xs, dense in self.segments:
            m = ~done & (x >= lo) & (x <= hi)
            if np.any(m):
                val, der = kernels.dense_eval(xs, dense, x[m])
                P[m] = val[:, 0]
                dP[m] = der[:, 0]
                W[m] = val[:, 1]
                done |= m
        if not np.all(done):
            raise ConfigError("evaluation point outside the integrated range")
        return P, dP, W


def integrate_momentum(model: PotentialModel, k: float, x_start: float, P_start: complex,
                       ends, rtol: float = RTOL, atol: float = ATOL) -> MomentumSolution:
    """Integrate the Riccati equation from ``x_start`` to each of ``ends``."""
    ucoef = np.ascontiguousarray(model.coefficients, dtype=float)
    hbar = model.hbar
    pabs = abs(complex(classical_momentum(model, k, x_start)))
    h0 = 1e-2 * hbar / max(pabs, 1.0)
    segments = []
    for end in ends:
        end = float(end)
        if end == x_start:
            continue
        n, xs, ys, dense, status = kernels.dopri5_riccati(
            ucoef, k * k, hbar, float(x_start), complex(P_start), 0j, end,
            rtol, atol, h0, MAX_STEPS)
        if status != kernels.STATUS_OK:
            what = "step size underflow" if status == kernels.STATUS_UNDERFLOW else "step budget"
            raise StiffnessFailure(
                f"Riccati integration from {x_start} to {end} failed ({what}) at x = {xs[-1]}")
        segments.append((min(x_start, end), max(x_start, end), xs, dense))
    return MomentumSolution(model, k, x_start, P_start, segments)


def solve_momentum(model: PotentialModel, shell: EnergyShell, ends, *,
                   seed_wavelengths: float = SEED_WAVELENGTHS, rtol: float = RTOL,
                   atol: float = ATOL, start_value: complex | None = None) -> MomentumSolution:
    """Default-seeded Riccati solution covering all of ``ends``."""
    x_s = seed_point(model, shell, seed_wavelengths)
    P_s = wkb_seed(model, shell.k, x_s) if start_value is None else complex(start_value)
    return integrate_momentum(model, shell.k, x_s, P_s, ends, rtol, atol)


def riccati_second(model: PotentialModel, k: float, x, P, dP) -> np.ndarray:
    """``P''`` from differentiating ``P' = -i (P^2 - p^2) / hbar``."""
    return -1j * (2.0 * P * dP + model.U(np.asarray(x, dtype=float), 1)) / model.hbar


def solve_q_selfconsistent(model: PotentialModel, shell: EnergyShell,
                           seed: ComplexField | None = None,
                           direction: Direction = Direction.LTR,
                           grid_spec: GridSpec | None = None, *,
                           seed_wavelengths: float = SEED_WAVELENGTHS,
                           rtol: float = RTOL, atol: float = ATOL) -> ComplexField:
    """Full correction ``Q`` from the Riccati equation.

    Parameters
    ----------
    model, shell : PotentialModel, EnergyShell
        Problem definition.
    seed : ComplexField, optional
        Defines the target grid. If the start point lies inside its hull its
        value there is used as initial condition instead of the third-order
        WKB value.
    direction : Direction
        ``LTR`` returns ``Q``; ``RTL`` returns the conjugate-branch field
        ``conj(P) - p``.
    grid_spec : GridSpec, optional
        Grid parameters when no seed is given.

    Returns
    -------
    ComplexField
        ``Q`` on the grid, interpolated through the smooth ``P``; the
        derivative comes from the integrator's continuous extension and the
        primitive ``int P`` from the augmented ``W`` component.
    """
    grid = seed.grid if seed is not None else make_grid(model, shell, grid_spec)
    k = shell.k
    x_s = seed_point(model, shell, seed_wavelengths)
    start_value = None
    if seed is not None and seed.grid[0] <= x_s <= seed.grid[-1]:
        q_s = complex(seed(x_s))
        start_value = q_s + complex(classical_momentum(model, k, x_s))
    sol = solve_momentum(model, shell, (grid[0], grid[-1]), seed_wavelengths=seed_wavelengths,
                         rtol=rtol, atol=atol, start_value=start_value)
    P, dP, W = sol.eval(grid)
    p = classical_momentum(model, k, grid)
    field = ComplexField(grid, P - p, Direction.LTR, k, model, momentum_offset=True,
                         smooth_derivative=dP, smooth_second_derivative=riccati_second(
                             model, k, grid, P, dP),
                         primitive_values=W, label="riccati",
                         meta={"x_start": sol.x_start, "seed_wavelengths": seed_wavelengths,
                               "rtol": rtol, "atol": atol})
    return field.with_direction(direction)


def decaying_field(model: PotentialModel, shell: EnergyShell, side: str,
                   grid_spec: GridSpec | None = None, *, decay: float = DECAY_ACTION,
                   rtol: float = RTOL, atol: float = ATOL) -> ComplexField:
    """Total momentum of the decaying solution in a forbidden region.

    The solution is started deep in the forbidden region on the side
    ``"left"`` or ``"right"`` (where ``int |p| / hbar >= decay``) with the
    decaying WKB branch and integrated towards the turning point, which is the
    numerically stable direction. The returned field holds ``Q_out = P_out - p``
    on the forbidden part of the grid including the turning point; ``P_out``
    is purely imaginary for the real decaying wave function.
    """
    if side not in ("left", "right"):
        raise ConfigError("side must be 'left' or 'right'")
    if not shell.turning_points:
        raise NoTurningPoint("a forbidden-region solution needs a turning point")
    k = shell.k
    x_t = shell.turning_points[-1] if side == "right" else shell.turning_points[0]
    d = 1 if side == "right" else -1
    if _classical_side(model, k, x_t) == d:
        raise ConfigError(f"the {side} side of x_t = {x_t} is not forbidden")
    x_f = _march_to_action(model, k, x_t, d, decay * model.hbar, imaginary=True)
    sigma = d  # right: P ~ +i|p| decays rightwards; left: P ~ -i|p| decays leftwards
    P_f = wkb_seed(model, k, x_f, sigma=sigma)
    sol = integrate_momentum(model, k, x_f, P_f, (x_t,), rtol, atol)
    base = make_grid(model, shell, grid_spec)
    spec = grid_spec or GridSpec()
    if side == "right":
        far = make_grid(model, shell, GridSpec(window=(x_t, max(x_f, base[-1])),
                                               points_per_wavelength=spec.points_per_wavelength))
        grid = np.unique(np.concatenate([base[base >= x_t], far, [x_t]]))
        grid = grid[grid <= x_f]
    else:
        far = make_grid(model, shell, GridSpec(window=(min(x_f, base[0]), x_t),
                                               points_per_wavelength=spec.points_per_wavelength))
        grid = np.unique(np.concatenate([base[base <= x_t], far, [x_t]]))
        grid = grid[grid >= x_f]
    P, dP, W = sol.eval(grid)
    p = classical_momentum(model, k, grid)
    return ComplexField(grid, P - p, Direction.LTR, k, model, momentum_offset=True,
                        smooth_derivative=dP,
                        smooth_second_derivative=riccati_second(model, k, grid, P, dP),
                        primitive_values=W, label="decaying",
                        meta={"side": side, "x_far": x_f, "x_t": x_t})


def hj_residual(field: ComplexField, x=None) -> np.ndarray:
    """``|Q (2p + Q) - i hbar (p' + Q')|`` at ``x`` (default: the grid nodes).

    For momentum-type fields this is evaluated as ``|P^2 - p^2 - i hbar P'|``
    with ``P'`` from the stored derivative (the integrator's continuous
    extension), which avoids the cancelling ``p'`` singularities.
    """
    model = field.model
    if model is None:
        raise ConfigError("residual needs the field's model")
    x = field.grid if x is None else np.asarray(x, dtype=float)
    k = field.energy_k
    if field.momentum_offset:
        P = field.smooth(x)
        dP = field.smooth_prime(x)
        sign = 1.0 if field.direction is Direction.LTR else -1.0
        return np.abs(P * P - model.momentum_sq(k, x) - sign * 1j * model.hbar * dP)
    p, dp = momentum_derivatives(model, k, x, order=1)
    Q = field(x)
    dQ = field.derivative(x)
    return np.abs(Q * (2 * p + Q) - 1j * model.hbar * (dp + dQ))


# -- zeroth order and fixed-point iterates ------------------------------------------------
def _anchor(shell: EnergyShell):
    if not shell.turning_points:
        raise NoTurningPoint("Q0 needs at least one turning point")
    return shell.turning_points[0]


def _extended_grid(model, shell, grid_spec, far_wavelengths=FAR_WAVELENGTHS):
    """Window grid extended into the far classical region for open shells."""
    spec = grid_spec or GridSpec()
    lo, hi = spec.window if spec.window is not None else shell.window
    if shell.n_turning != 1:
        return make_grid(model, shell, spec), (lo, hi), None
    x_t = shell.turning_points[0]
    d = _classical_side(model, shell.k, x_t)
    x_far = _march_to_action(model, shell.k, x_t, d,
                             2.0 * math.pi * model.hbar * far_wavelengths)
    ext = (lo, max(hi, x_far)) if d > 0 else (min(lo, x_far), hi)
    g = make_grid(model, shell, GridSpec(window=ext,
                                         points_per_wavelength=spec.points_per_wavelength,
                                         max_step=spec.max_step,
                                         turning_point_step=spec.turning_point_step,
                                         extra_points=tuple(spec.extra_points) + (lo, hi)))
    return g, (lo, hi), d


def _substitution_modes(grid, tps):
    a_tp = np.zeros(grid.size - 1, dtype=bool)
    b_tp = np.zeros(grid.size - 1, dtype=bool)
    for t in tps:
        a_tp |= np.abs(grid[:-1] - t) <= 1e-12 * max(1.0, abs(t))
        b_tp |= np.abs(grid[1:] - t) <= 1e-12 * max(1.0, abs(t))
    return np.where(a_tp, SQRT_LEFT, np.where(b_tp, SQRT_RIGHT, LINEAR))


def _self_consistent_pass(model, shell, grid, d, prev: ComplexField | None):
    """One evaluation of ``Q = e^{-Phi} int_x^b p' e^{Phi}``.

    ``Phi = (i/hbar) int (2p + Q_prev)`` with ``Q_prev = 0`` for ``Q0``.
    ``b`` is the potential minimum for wells and infinity on the classical
    side for open shells (tail by integration by parts).
    """
    k = shell.k
    hbar = model.hbar
    x_a = _anchor(shell)
    s_a = 0.0

    if prev is None:
        def phase(y):
            return (2j / hbar) * classical_action(model, k, x_a, y)
    else:
        prim_a = prev.primitive(x_a)

        def phase(y):
            s = classical_action(model, k, x_a, y)
            return (1j / hbar) * (s + (prev.primitive(y) - prim_a))

    def integrand(y, _owner):
        shp = y.shape
        yf = y.ravel()
        _, dp = momentum_derivatives(model, k, yf, order=1)
        return (dp * np.exp(phase(yf))).reshape(shp)

    modes = _substitution_modes(grid, shell.turning_points)
    cells = integrate_intervals(integrand, grid[:-1], grid[1:], modes,
                                atol=1e-14, rtol=1e-12)
    Phi = np.asarray(phase(grid), dtype=complex)
    n = grid.size
    K = np.empty(n, dtype=complex)
    if d is None:
        x_m = shell.x_min if shell.x_min is not None else 0.5 * sum(shell.turning_points)
        m = int(np.argmin(np.abs(grid - x_m)))
        # K_i = int_{x_i}^{x_m}
        left = np.concatenate([np.cumsum(cells[:m][::-1])[::-1], [0.0]])
        K[: m + 1] = left
        K[m + 1:] = -np.cumsum(cells[m:])
    else:
        X = grid[-1] if d > 0 else grid[0]
        p, dp, d2p, d3p = momentum_derivatives(model, k, X, order=3)
        q_prev = 0.0 if prev is None else complex(prev(X))
        dPhi = (1j / hbar) * (2 * p + q_prev)
        u0 = dp / dPhi
        u1 = (hbar**2 / 4) * (d2p / p**2 - dp**2 / p**3)
        u2 = (1j * hbar**3 / 8) * (d3p / p**3 - 4 * dp * d2p / p**4 + 3 * dp**3 / p**5)
        tail = -np.exp(complex(phase(np.array([X]))[0])) * (u0 + u1 + u2)
        if d > 0:
            K[:] = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]]) + tail
        else:
            K[:] = -np.concatenate([[0.0], np.cumsum(cells)]) + tail
    Q = np.exp(-Phi) * K
    p_grid = classical_momentum(model, k, grid)
    q_prev_grid = np.zeros(n) if prev is None else prev.values
    dsmooth = -(1j / hbar) * (2 * p_grid + q_prev_grid) * Q
    # primitive of the smooth part is left to spline integration
    return ComplexField(grid, Q, Direction.LTR, k, model, momentum_offset=True,
                        smooth_derivative=dsmooth, label="q0" if prev is None else "iterate")


def _zero(model, shell, grid, direction):
    grid = np.asarray(grid)
    z = ComplexField(grid, np.zeros(grid.size, dtype=complex), Direction.LTR, shell.k, model,
                     momentum_offset=True,
                     smooth_derivative=np.zeros(grid.size, dtype=complex), label="q0")
    return z.with_direction(direction)


def q0_quadrature(model: PotentialModel, shell: EnergyShell,
                  direction: Direction = Direction.LTR,
                  grid_spec: GridSpec | None = None) -> ComplexField:
    """Zeroth-order correction ``Q0`` by oscillatory quadrature.

    ``Q0(x) = e^{-2is(x)/hbar} int_x^b p'(y) e^{2is(y)/hbar} dy`` with ``s``
    anchored at the (first) turning point. Cells touching a turning point use
    the square-root substitution. ``b`` is infinity on the classical side for
    one-turning-point shells (tail by integration by parts beyond 40
    wavelengths) and the potential minimum for wells.

    Raises
    ------
    NoTurningPoint
        Non-constant potential without turning point.
    QuadratureFailure
        Refinement did not converge.
    """
    if model.is_constant:
        return _zero(model, shell, make_grid(model, shell, grid_spec), direction)
    grid, (lo, hi), d = _extended_grid(model, shell, grid_spec)
    _anchor(shell)
    field = _self_consistent_pass(model, shell, grid, d, None)
    return field.restrict(lo, hi).with_direction(direction)


def iterate_q_fixed_point(model: PotentialModel, shell: EnergyShell, n_iters: int,
                          grid_spec: GridSpec | None = None) -> list[ComplexField]:
    """Successive substitution into the self-consistent formula.

    Returns ``n_iters`` fields: ``[Q0, Q^(1), ...]``, where each iterate uses
    the previous one inside the exponent ``(i/hbar) int (2p + Q)``.
    """
    if not 1 <= int(n_iters) <= 8:
        raise ConfigError("n_iters must lie in [1, 8]")
    if model.is_constant:
        z = _zero(model, shell, make_grid(model, shell, grid_spec), Direction.LTR)
        return [z for _ in range(int(n_iters))]
    grid, (lo, hi), d = _extended_grid(model, shell, grid_spec)
    _anchor(shell)
    out = []
    prev = None
    for _ in range(int(n_iters)):
        prev = _self_consistent_pass(model, shell, grid, d, prev)
        out.append(prev)
    return [f.restrict(lo, hi) for f in out]


def q0_closed_form_linear(model: PotentialModel, shell: EnergyShell, x) -> complex:
    """Closed-form ``Q0`` for the linear potential with ``f > 0``.

    ``Q0 = e^{i pi/6} 6^{-2/3} (f hbar)^{1/3} e^{-2is/hbar} Gamma(1/3, -2is/hbar)``
    with ``s`` measured from the turning point and the principal branch of
    the incomplete gamma function. ``e^{i pi/6} = (-i)^{-1/3}`` on the
    principal branch, which reproduces the quadrature.
    """
    from .potential import PotentialKind

    if model.kind is not PotentialKind.LINEAR or model.slope <= 0:
        raise ConfigError("closed form requires the linear model with f > 0")
    f = model.slope
    hbar = model.hbar
    x_t = shell.turning_points[0] if shell.turning_points else -shell.k**2 / f
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    pref = np.exp(1j * math.pi / 6) * 6.0 ** (-2.0 / 3.0) * (f * hbar) ** (1.0 / 3.0)
    out = np.empty(xs.size, dtype=complex)
    for i, xi in enumerate(xs):
        z = -2j * complex(classical_action(model, shell.k, x_t, xi)) / hbar
        if abs(z.imag) < 1e-300 and z.real < 0:
            z = complex(z.real, 0.0)
        out[i] = pref * np.exp(z) * inc_gamma_upper(1.0 / 3.0, z)
    return complex(out[0]) if np.ndim(x) == 0 else out


# -- diagnostics ------------------------------------------------------------------------------
TP_BOUND_CONST = 3.0 ** (1.0 / 3.0) / 2.0 ** (2.0 / 3.0)


def turning_point_bound(model: PotentialModel, shell: EnergyShell) -> float:
    """Order-of-magnitude estimate of ``|Q|`` at the (outermost) turning point.

    ``3^{1/3} 2^{-2/3} Gamma(4/3) (hbar |U'(x_t)|)^{1/3}``. The cube-root
    form reproduces the exact linear-potential value ``|Q0(x_t)|`` and its
    ``f^{1/3}`` scaling.
    """
    if not shell.turning_points:
        raise NoTurningPoint("no turning point")
    x_t = shell.turning_points[-1]
    slope = abs(float(model.U(x_t, 1)))
    if slope == 0.0:
        raise DomainError(f"degenerate turning point at x = {x_t}")
    return TP_BOUND_CONST * gamma(4.0 / 3.0) * (model.hbar * slope) ** (1.0 / 3.0)


def quantality(model: PotentialModel, shell: EnergyShell, x):
    """``(hbar^2/2) [p''/p - (3/2)(p'/p)^2]`` evaluated with the classical ``p``.

    Raises
    ------
    DomainError
        At a turning point.
    """
    xs = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p, dp, d2p = momentum_derivatives(model, shell.k, xs, order=2)
    if np.any(np.abs(p) < 1e-12):
        raise DomainError("quantality is singular at turning points")
    val = 0.5 * model.hbar**2 * (d2p / p - 1.5 * (dp / p) ** 2)
    val = np.real(val)
    return float(val) if np.ndim(val) == 0 else val
