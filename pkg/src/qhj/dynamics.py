"""Quantum trajectories from the energy derivative of the action.

The trajectory equation ``t - t0 = Re dS/dE`` with
``Re S = int_{x_ref}^x Re P - E (t - t0)`` gives the running time

    t(x) = d/dE Re int_{x_ref}^x P dx,

evaluated by central differences in ``k`` (``E = k^2 / 2``, ``dE = k dk``).
The running-time differences to classical motion are

    dt_fwd = t_cl(x_ref -> x2) - t_q(x_ref -> x2),   dt_bwd = -dt_fwd,

and the total time-shift is ``dt = dt_fwd - dt_bwd``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, EnergyDerivativeFailure, FitFailure
from .fields import ComplexField
from .potential import (EnergyShell, PotentialKind, PotentialModel, classical_action,
                        classical_momentum, classical_time, find_turning_points)
from .qcf import ATOL, RTOL, SEED_WAVELENGTHS, hj_residual, solve_momentum

DK_REL = 1e-3
CAUSALITY_TOL = 1e-6
FIT_SIN_MIN = 0.2
FIT_MAX_RESIDUAL = 0.25
BRANCH_SAMPLES = 401


# -- energy derivatives ------------------------------------------------------------------
def _is_classical(q: ComplexField) -> bool:
    return q.label == "zero" or (not q.momentum_offset and not np.any(q.values))


def _action_at(model: PotentialModel, shell: EnergyShell, q: ComplexField, k: float, xs):
    """``Re int P`` at ``xs`` (common constant) for energy ``k``."""
    if q.label != "riccati":
        raise ConfigError(f"cannot recompute a '{q.label}' field at another energy")
    sh = find_turning_points(model, k, shell.window)
    if sh.n_turning != shell.n_turning:
        raise EnergyDerivativeFailure("turning-point count changes within the k-stencil")
    sol = solve_momentum(model, sh, (float(np.min(xs)), float(np.max(xs))),
                         seed_wavelengths=q.meta.get("seed_wavelengths", SEED_WAVELENGTHS),
                         rtol=q.meta.get("rtol", RTOL), atol=q.meta.get("atol", ATOL))
    return sol.eval(xs)[2].real


def action_energy_derivative(model: PotentialModel, shell: EnergyShell, q: ComplexField,
                             xs, dk_rel: float = DK_REL) -> np.ndarray:
    """``d/dE Re int P`` at ``xs`` up to a common constant.

    Raises
    ------
    EnergyDerivativeFailure
        If the difference quotient is not finite.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    k = shell.k
    if k <= 0:
        raise EnergyDerivativeFailure("energy derivative needs k > 0")
    dk = dk_rel * k
    with ThreadPoolExecutor(max_workers=2) as pool:
        plus, minus = pool.map(lambda kk: _action_at(model, shell, q, kk, xs), (k + dk, k - dk))
    d = (plus - minus) / (2.0 * dk) / k
    if not np.all(np.isfinite(d)):
        raise EnergyDerivativeFailure("non-finite energy difference quotient")
    return d


def trajectory_time(model: PotentialModel, shell: EnergyShell, q: ComplexField,
                    x_ref: float, x, dk_rel: float = DK_REL):
    """Running time ``t(x) - t(x_ref)`` from the trajectory equation.

    ``Q = 0`` fields use the classical time ``int dx / p`` directly.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if _is_classical(q):
        out = np.array([classical_time(model, shell.k, x_ref, xi) for xi in xs])
    else:
        d = action_energy_derivative(model, shell, q, np.append(xs, x_ref), dk_rel)
        out = d[:-1] - d[-1]
    return float(out[0]) if np.ndim(x) == 0 else out


def velocity(model: PotentialModel, shell: EnergyShell, q: ComplexField, x,
             dk_rel: float = DK_REL):
    """Trajectory velocity ``dx/dt = 1 / (d Re P / dE)`` at ``x`` (``m = 1``)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if _is_classical(q):
        out = np.real(classical_momentum(model, shell.k, xs))
    else:
        k = shell.k
        dk = dk_rel * k

        def P_at(kk):
            sh = find_turning_points(model, kk, shell.window)
            sol = solve_momentum(model, sh, (float(xs.min()), float(xs.max())),
                                 seed_wavelengths=q.meta.get("seed_wavelengths", SEED_WAVELENGTHS))
            return sol.eval(xs)[0].real

        dPdE = (P_at(k + dk) - P_at(k - dk)) / (2.0 * dk) / k
        if not np.all(np.isfinite(dPdE)):
            raise EnergyDerivativeFailure("non-finite energy difference quotient")
        out = 1.0 / dPdE
    return float(out[0]) if np.ndim(x) == 0 else out


# -- time shifts ---------------------------------------------------------------------------
class TimeShift(NamedTuple):
    """Total time-shift and its forward/backward running-time differences."""

    dt: float
    dt_fwd: float
    dt_bwd: float


def time_shift_total(model: PotentialModel, shell: EnergyShell, q: ComplexField,
                     x_ref: float | None = None, dk_rel: float = DK_REL,
                     tol: float = CAUSALITY_TOL) -> TimeShift:
    """Total time-shift between quantum and classical round trips.

    A warning is issued if the shift is negative beyond ``tol`` (acausal).
    """
    _, x2 = shell.require_well()
    if x_ref is None:
        x_ref = shell.x_min
    if _is_classical(q):
        return TimeShift(0.0, 0.0, 0.0)
    t_q = trajectory_time(model, shell, q, x_ref, x2, dk_rel)
    t_cl = classical_time(model, shell.k, x_ref, x2)
    fwd = t_cl - t_q
    ts = TimeShift(2.0 * fwd, fwd, -fwd)
    if ts.dt < -tol:
        warnings.warn(f"negative total time-shift {ts.dt:.3e} at k = {shell.k}", RuntimeWarning,
                      stacklevel=2)
    return ts


def loop_integral_re_q(model: PotentialModel, shell: EnergyShell, q: ComplexField) -> float:
    """``oint Re Q dx`` over the closed orbit.

    The backward sweep carries momentum ``-P_rtl`` with ``Re P_rtl = Re P``
    (parity rule), so both sweeps contribute ``int_{x1}^{x2} Re Q``.
    """
    x1, x2 = shell.require_well()
    if _is_classical(q):
        return 0.0
    if q.momentum_offset:
        half = q.integral(x1, x2).real - classical_action(model, shell.k, x1, x2).real
    else:
        half = q.integral(x1, x2).real
    return 2.0 * half


def phase_space_invariance_check(model: PotentialModel, shell: EnergyShell, q: ComplexField,
                                 x_ref: float | None = None) -> tuple[float, float]:
    """Both sides of ``E dt = -1/2 oint Re Q dx``, evaluated independently."""
    dt = time_shift_total(model, shell, q, x_ref).dt
    return shell.energy * dt, -0.5 * loop_integral_re_q(model, shell, q)


def isoenergeticity_residual(model: PotentialModel, shell: EnergyShell, q: ComplexField, x):
    """``|2pQ + Q^2 - i hbar (p' + Q')|`` at ``x``."""
    out = hj_residual(q, np.atleast_1d(np.asarray(x, dtype=float)))
    return float(out[0]) if np.ndim(x) == 0 else out


# -- branches ---------------------------------------------------------------------------------
@dataclass(frozen=True)
class Branch:
    """One sweep between the turning points."""

    t_start: float
    t_end: float
    t: np.ndarray
    x: np.ndarray
    forward: bool


@dataclass(frozen=True, eq=False)
class ApparentTrajectory:
    """Continuous curve ``A(t) sin(Omega t)`` through the branch gaps.

    ``amplitude_gap`` is the amplitude used inside gaps (continuous with the
    branch endpoints); ``amplitude_fit`` the least-squares amplitude over the
    branch interiors.
    """

    t: np.ndarray
    x: np.ndarray
    amplitude_fit: float
    amplitude_gap: float
    fit_residual: float


@dataclass(frozen=True, eq=False)
class TrajectoryBranches:
    """Disconnected trajectory branches of ``n_periods`` periods.

    Branch ``j`` starts ``T/2`` after branch ``j-1``; branches alternate
    between forward and backward sweeps and are separated by ``gap``.
    Branch 0 passes ``x_ref`` at ``t = 0``.
    """

    branches: list
    delta_t: float
    period_T: float
    gap: float
    x_ref: float
    apparent: ApparentTrajectory | None = None
    meta: dict = field(default_factory=dict)

    @property
    def span(self) -> float:
        """Time from the first branch start to the end of the last gap."""
        return self.branches[-1].t_end + self.gap - self.branches[0].t_start


def _sample_positions(x1, x2, n):
    # Chebyshev-Lobatto nodes cluster at the turning points
    return x1 + 0.5 * (x2 - x1) * (1.0 - np.cos(np.linspace(0.0, math.pi, n)))


def assemble_branches(model: PotentialModel, shell: EnergyShell, q: ComplexField,
                      n_periods: int, x_ref: float | None = None,
                      n_samples: int = BRANCH_SAMPLES, dk_rel: float = DK_REL) -> TrajectoryBranches:
    """Alternating forward/backward sweeps with gaps at the turning points."""
    if not isinstance(n_periods, (int, np.integer)) or not 1 <= n_periods <= 100:
        raise ConfigError("n_periods must be an integer in [1, 100]")
    x1, x2 = shell.require_well()
    if x_ref is None:
        x_ref = shell.x_min
    T = shell.period_T
    xs = _sample_positions(x1, x2, n_samples)
    t_of_x = trajectory_time(model, shell, q, x_ref, xs, dk_rel)
    if np.any(np.diff(t_of_x) <= 0):
        raise EnergyDerivativeFailure("running time is not monotone between the turning points")
    tau = t_of_x[-1] - t_of_x[0]
    gap = 0.5 * T - tau
    ts = time_shift_total(model, shell, q, x_ref, dk_rel)
    branches = []
    t0 = t_of_x[0]
    for j in range(2 * n_periods):
        start = t0 + 0.5 * T * j
        if j % 2 == 0:
            t = start + (t_of_x - t_of_x[0])
            x = xs
        else:
            t = start + (t_of_x[-1] - t_of_x[::-1])
            x = xs[::-1]
        branches.append(Branch(float(start), float(start + tau), t, x.copy(), j % 2 == 0))
    return TrajectoryBranches(branches, ts.dt, T, float(gap), float(x_ref),
                              meta={"k": shell.k, "dt_fwd": ts.dt_fwd, "dt_bwd": ts.dt_bwd})


def apparent_continuation_ho(branches: TrajectoryBranches, model: PotentialModel,
                             shell: EnergyShell, n_gap: int = 64) -> ApparentTrajectory:
    """Continue the harmonic-oscillator trajectory through the gaps.

    Inside each gap ``x = A_gap sin(Omega t)`` with ``A_gap`` fixed by
    continuity at the branch ends, so the curve leaves the classical region.

    Raises
    ------
    FitFailure
        If the branch samples are not of the form ``A sin(Omega t)`` within
        ``FIT_MAX_RESIDUAL`` (relative rms).
    """
    if model.kind is not PotentialKind.HARMONIC:
        raise ConfigError("apparent continuation is defined for the harmonic oscillator")
    w = model.omega
    x1, x2 = shell.require_well()
    t_all = np.concatenate([b.t for b in branches.branches])
    x_all = np.concatenate([b.x for b in branches.branches])
    s = np.sin(w * t_all)
    m = np.abs(s) > FIT_SIN_MIN
    a_fit = float(np.dot(s[m], x_all[m]) / np.dot(s[m], s[m]))
    resid = float(np.sqrt(np.mean((x_all[m] - a_fit * s[m]) ** 2)) / abs(a_fit))
    if not np.isfinite(resid) or resid > FIT_MAX_RESIDUAL:
        raise FitFailure(f"amplitude fit residual {resid:.3e} exceeds {FIT_MAX_RESIDUAL}")
    gap = branches.gap
    a_gap = x2 / math.cos(0.5 * w * gap) if gap > 0 else x2
    ts, xs = [], []
    bl = branches.branches
    for j, b in enumerate(bl):
        ts.append(b.t)
        xs.append(b.x)
        if gap > 0:
            tg = np.linspace(b.t_end, b.t_end + gap, n_gap + 2)[1:-1]
            ts.append(tg)
            xs.append(a_gap * np.sin(w * tg))
    return ApparentTrajectory(np.concatenate(ts), np.concatenate(xs), a_fit, float(a_gap), resid)
