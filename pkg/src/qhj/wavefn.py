"""Wave functions from running-wave actions.

With ``S(x) = int_{x_a}^{x} P`` accumulated from an anchor turning point
``x_a``, the real wave function is

    Psi(x) = exp(-Im S / hbar) cos(Re S / hbar - phi / 2),

which equals ``Re{c1 e^{iS1/hbar} + c2 e^{iS2/hbar}}`` for the conjugate pair
``S1 = S``, ``S2 = -conj(S)``, ``c1 = e^{-i phi/2} / 2``, ``c2 = conj(c1)``.
The left-to-right construction is anchored at the left turning point, the
right-to-left construction at the right turning point with
``S = int_x^{x2} P_rtl`` and ``P_rtl = conj(P)``.

The reflection phase enters as ``-phi/2`` when the anchor's forbidden region
lies behind the integration direction (the usual case) and as ``+phi/2``
otherwise, so that both directions build the same wave around a single
turning point. The phase may be referred to another point ``x_ref`` by
passing ``phi`` including its gauge part; the envelope stays anchored at the
turning point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DirectionMismatch, NoTurningPoint
from .fields import ComplexField, Direction, RealField
from .potential import EnergyShell, classical_action, classical_momentum


@dataclass(frozen=True, eq=False)
class WaveField:
    """Sampled real wave function in trigonometric form.

    Attributes
    ----------
    grid : ndarray
    psi : ndarray
        ``envelope * cos(phase)`` at every node.
    envelope : ndarray
        Positive amplitude ``exp(-Im S / hbar)``.
    phase : ndarray
        ``Re S / hbar -+ phi / 2`` (accumulated, never wrapped).
    direction : Direction
    reflection_phase_used : float
    anchor : float
        Turning point the integrals start from.
    """

    grid: np.ndarray
    psi: np.ndarray
    envelope: np.ndarray
    phase: np.ndarray
    direction: Direction
    reflection_phase_used: float
    anchor: float

    def __call__(self, x):
        """Cubic-spline interpolation of ``psi``."""
        return RealField(self.grid, self.psi)(x)


def running_action(q: ComplexField, a: float, x):
    """``int_a^x (p + Q)`` for a correction field ``q`` in its own direction.

    Momentum-type fields integrate their smooth ``P`` directly; other fields
    add the analytic classical action to ``int Q``.
    """
    if q.momentum_offset:
        return q.integral(a, x)
    if q.model is None:
        raise ConfigError("the field needs a model to form the action")
    s = classical_action(q.model, q.energy_k, a, x)
    if q.direction is Direction.RTL:
        # p_rtl = conj(p): the forbidden-region part of the action flips sign
        s = np.conj(s)
    return s + q.integral(a, x)


def _build(q: ComplexField, shell: EnergyShell, phi: float, direction: Direction,
           anchor: float, x_ref: float | None) -> WaveField:
    if q.direction is not direction:
        raise DirectionMismatch(f"expected a {direction.value} field, got {q.direction.value}")
    hbar = q.hbar
    grid = q.grid
    if direction is Direction.LTR:
        S = running_action(q, anchor, grid)
        ref_shift = 0.0 if x_ref is None else running_action(q, anchor, x_ref).real
    else:
        S = -running_action(q, anchor, grid)
        ref_shift = 0.0 if x_ref is None else -running_action(q, anchor, x_ref).real
    side = _side_of(q, shell, anchor)
    behind = (side == "left") == (direction is Direction.LTR)
    sgn = -1.0 if behind else 1.0
    envelope = np.exp(-S.imag / hbar)
    phase = (S.real - ref_shift) / hbar + sgn * 0.5 * phi
    return WaveField(grid, envelope * np.cos(phase), envelope, phase, direction,
                     float(phi), float(anchor))


def _side_of(q: ComplexField, shell: EnergyShell, x_t: float) -> str:
    tps = shell.turning_points
    if len(tps) == 2:
        return "left" if x_t == tps[0] else "right"
    model = q.model
    span = max(1.0, shell.window[1] - shell.window[0])
    return "left" if float(model.momentum_sq(shell.k, x_t - 1e-6 * span)) < 0 else "right"


def _anchor(shell: EnergyShell, which: int) -> float:
    if not shell.turning_points:
        raise NoTurningPoint("wave construction needs a turning point")
    return shell.turning_points[which]


def build_wave_ltr(q: ComplexField, shell: EnergyShell, phi: float,
                   x_ref: float | None = None) -> WaveField:
    """Left-to-right wave anchored at the left turning point.

    Parameters
    ----------
    q : ComplexField
        Left-to-right correction (or momentum) field.
    shell : EnergyShell
    phi : float
        Reflection phase at the anchor. If ``x_ref`` is given, ``phi`` must
        include the gauge part referred to ``x_ref``.
    x_ref : float, optional
        Reference point of the accumulated phase.

    Raises
    ------
    DirectionMismatch
        If ``q`` is not a left-to-right field.
    """
    return _build(q, shell, phi, Direction.LTR, _anchor(shell, 0), x_ref)


def build_wave_rtl(q: ComplexField, shell: EnergyShell, phi: float,
                   x_ref: float | None = None) -> WaveField:
    """Right-to-left wave anchored at the right turning point.

    Uses ``S = int_x^{x2} P_rtl``; for a single turning point the anchor is
    that point. See :func:`build_wave_ltr` for the parameters.
    """
    return _build(q, shell, phi, Direction.RTL, _anchor(shell, -1), x_ref)


def continue_decaying(wave: WaveField, outer: ComplexField) -> WaveField:
    """Replace the wave beyond a turning point by the decaying solution.

    ``outer`` is a field from :func:`qhj.qcf.decaying_field`. Nodes on its
    forbidden side of ``x_t`` and inside its hull get
    ``Psi(x_t) exp(i int_{x_t}^x P_out / hbar)`` (real, since ``P_out`` is
    imaginary) with the phase frozen at its turning-point value.
    """
    side = outer.meta.get("side")
    if side not in ("left", "right"):
        raise ConfigError("outer must come from decaying_field")
    x_t = float(outer.meta["x_t"])
    g = wave.grid
    lo, hi = outer.grid[0], outer.grid[-1]
    m = ((g > x_t) if side == "right" else (g < x_t)) & (g >= lo) & (g <= hi)
    env_t = float(np.interp(x_t, g, wave.envelope))
    ph_t = float(np.interp(x_t, g, wave.phase))
    hbar = outer.hbar
    env = wave.envelope.copy()
    ph = wave.phase.copy()
    env[m] = env_t * np.exp(-outer.integral(x_t, g[m]).imag / hbar)
    ph[m] = ph_t
    return WaveField(g, env * np.cos(ph), env, ph, wave.direction,
                     wave.reflection_phase_used, wave.anchor)


def superposition(q: ComplexField, shell: EnergyShell, phi: float) -> np.ndarray:
    """``Re{c1 e^{iS1/hbar} + c2 e^{iS2/hbar}}`` on ``q.grid`` for the
    left-to-right conjugate pair (complex array; its imaginary part is zero)."""
    if q.direction is not Direction.LTR:
        raise DirectionMismatch("superposition expects a left-to-right field")
    hbar = q.hbar
    S1 = running_action(q, _anchor(shell, 0), q.grid)
    S2 = -np.conj(S1)
    c1 = 0.5 * np.exp(-0.5j * phi)
    c2 = np.conj(c1)
    return c1 * np.exp(1j * S1 / hbar) + c2 * np.exp(1j * S2 / hbar)


def action_field(q: ComplexField, anchor: float) -> ComplexField:
    """Running-wave action ``S(x) = int_anchor^x P`` as a field.

    The momentum field is kept in ``meta["momentum"]`` so that ``P`` can be
    evaluated off the nodes.
    """
    S = running_action(q, anchor, q.grid)
    P = q(q.grid) + classical_momentum(q.model, q.energy_k, q.grid)
    if q.direction is Direction.RTL:
        P = q(q.grid) + np.conj(classical_momentum(q.model, q.energy_k, q.grid))
    return ComplexField(q.grid, S, q.direction, q.energy_k, q.model, smooth_derivative=P,
                        label="action", meta={"anchor": anchor, "momentum": q})


def running_wave_stats(s_field: ComplexField, sign: int = 1) -> tuple[RealField, RealField]:
    """Density and current of one running wave ``e^{iS/hbar}``.

    ``rho = exp(-2 Im S / hbar)`` and ``j = sign * Re P * rho``.

    Parameters
    ----------
    s_field : ComplexField
        Action field from :func:`action_field`.
    sign : {+1, -1}
    """
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    q = s_field.meta.get("momentum")
    anchor = s_field.meta.get("anchor")
    if q is None or anchor is None:
        raise ConfigError("s_field must come from action_field")
    hbar = q.hbar

    def momentum(x):
        x = np.asarray(x, dtype=float)
        if q.momentum_offset:
            return q.smooth(x)
        p = classical_momentum(q.model, q.energy_k, x)
        return q(x) + (np.conj(p) if q.direction is Direction.RTL else p)

    def rho(x):
        return np.exp(-2.0 * np.imag(running_action(q, anchor, x)) / hbar)

    def cur(x):
        return sign * np.real(momentum(x)) * rho(x)

    g = s_field.grid
    return (RealField(g, rho(g), rho, "density"), RealField(g, cur(g), cur, "current"))


def wkb_wave(model, shell: EnergyShell, anchor: float, x) -> np.ndarray:
    """First-order WKB wave anchored at the turning point ``anchor``.

    ``|p|^{-1/2} cos(|s|/hbar - pi/4)`` on the classical side up to the next
    turning point and ``|p|^{-1/2} e^{-|s|/hbar} / 2`` on the anchor's
    forbidden side, with ``s = int_anchor^x p``; NaN elsewhere. Diverges at
    the turning points like ``|x - x_t|^{-1/4}``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    hbar = model.hbar
    k = shell.k
    tps = shell.turning_points
    p = classical_momentum(model, k, xs)
    s = classical_action(model, k, anchor, xs)
    span = max(1.0, shell.window[1] - shell.window[0])
    forbidden_left = float(model.momentum_sq(k, anchor - 1e-6 * span)) < 0
    others = [t for t in tps if t != anchor]
    if forbidden_left:
        cl = (xs >= anchor) & (xs <= (min(others) if others else np.inf))
        fb = xs < anchor
    else:
        cl = (xs <= anchor) & (xs >= (max(others) if others else -np.inf))
        fb = xs > anchor
    out = np.full(xs.size, np.nan)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        amp = np.abs(p) ** -0.5
        out[cl] = amp[cl] * np.cos(np.abs(s[cl]) / hbar - 0.25 * np.pi)
        out[fb] = 0.5 * amp[fb] * np.exp(-np.abs(s[fb]) / hbar)
    return out if np.ndim(x) else float(out[0])
