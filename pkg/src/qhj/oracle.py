"""Independent reference solutions.

* Numerov integration of ``hbar^2 psi'' + p^2 psi = 0`` with node-count
  bracketing and Casoratian matching for bound states;
* the exact quantum momentum of the linear potential from Airy functions;
* harmonic-oscillator eigenstates and the analytic spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import ConfigError, ShootingNotConverged
from .potential import EnergyShell, PotentialKind, PotentialModel, classical_momentum, potential_minimum
from .specfun import airy

NUMEROV_REL_STEP = 1e-3
DECAY_WIDTHS = 10.0
K_TOL = 1e-12
MAX_BISECT = 200


class OracleSource(str, Enum):
    NUMEROV = "numerov"
    AIRY_EXACT = "airy_exact"
    HERMITE = "hermite"


@dataclass(frozen=True, eq=False)
class OracleSolution:
    """Reference wave function samples.

    Attributes
    ----------
    grid : ndarray
    psi : ndarray
        Real samples (arbitrary normalization for Numerov solutions).
    eigen_k : float, optional
        Eigenvalue for bound-state solutions.
    source : OracleSource
    meta : dict
    """

    grid: np.ndarray
    psi: np.ndarray
    eigen_k: float | None
    source: OracleSource
    meta: dict = field(default_factory=dict)

    def recurrence_residual(self, model: PotentialModel) -> float:
        """Max relative residual of the Numerov three-term recurrence."""
        g = np.asarray(self.meta["g"])
        h = self.grid[1] - self.grid[0]
        c = h * h / 12.0
        psi = self.psi
        r = ((1 + c * g[2:]) * psi[2:] - 2 * (1 - 5 * c * g[1:-1]) * psi[1:-1]
             + (1 + c * g[:-2]) * psi[:-2])
        return float(np.max(np.abs(r)) / np.max(np.abs(psi)))


def _g(model: PotentialModel, k: float, grid: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(model.momentum_sq(k, grid) / model.hbar**2, dtype=float)


def _uniform(grid) -> tuple[np.ndarray, float]:
    grid = np.ascontiguousarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ConfigError("Numerov grid needs at least three points")
    h = (grid[-1] - grid[0]) / (grid.size - 1)
    if h <= 0 or np.max(np.abs(np.diff(grid) - h)) > 1e-9 * max(1.0, abs(h)):
        raise ConfigError("Numerov grid must be uniform and increasing")
    return grid, h


def _sweep_left(g, h):
    return kernels.numerov_sweep(g, h, 0.0, 1e-30)


def _sweep_right(g, h):
    return kernels.numerov_sweep(g[::-1].copy(), h, 0.0, 1e-30)[::-1]


def _nodes(model, k, grid, h):
    psi = _sweep_left(_g(model, k, grid), h)
    return kernels.count_sign_changes(psi, 0, psi.size)


def _casoratian(model, k, grid, h, m):
    g = _g(model, k, grid)
    L = kernels.numerov_sweep(g[: m + 2].copy(), h, 0.0, 1e-30)
    R = kernels.numerov_sweep(g[m:][::-1].copy(), h, 0.0, 1e-30)[::-1]
    a = np.array([L[m], L[m + 1]])
    b = np.array([R[0], R[1]])
    D = a[0] * b[1] - a[1] * b[0]
    return D / (np.linalg.norm(a) * np.linalg.norm(b)), L, R


def numerov_solve(model: PotentialModel, k: float, grid, bc: str = "left") -> OracleSolution:
    """Numerov solution on a uniform grid.

    Parameters
    ----------
    bc : {"left", "right", "eigen"}
        ``"left"``/``"right"`` start a solution that decays into the
        corresponding end; ``"eigen"`` finds the bound state whose node count
        equals that of the left solution at ``k`` (``k`` is a guess).
    """
    grid, h = _uniform(grid)
    g = _g(model, k, grid)
    if bc == "left":
        psi = _sweep_left(g, h)
    elif bc == "right":
        psi = _sweep_right(g, h)
    elif bc == "eigen":
        n = _nodes(model, k, grid, h)
        return _eigen_on_grid(model, n, grid, h, k_hi=max(2.0 * k, 1.0))
    else:
        raise ConfigError("bc must be 'left', 'right' or 'eigen'")
    psi = psi / np.max(np.abs(psi))
    return OracleSolution(grid, psi, None, OracleSource.NUMEROV, {"g": g, "bc": bc})


def _eigen_on_grid(model, n, grid, h, k_hi, k_lo=0.0):
    # bracket: nodes(k) <= n below the eigenvalue, > n above it
    lo, hi = k_lo, k_hi
    grow = 0
    while _nodes(model, hi, grid, h) <= n:
        lo, hi = hi, 2.0 * hi
        grow += 1
        if grow > 60:
            raise ShootingNotConverged(f"no upper bracket for state {n}")
    for _ in range(MAX_BISECT):
        if hi - lo < 1e-6 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if _nodes(model, mid, grid, h) > n:
            hi = mid
        else:
            lo = mid
    x_m = potential_minimum(model, grid[0], grid[-1])
    m = int(np.clip(np.searchsorted(grid, x_m if x_m is not None else 0.5 * (grid[0] + grid[-1])),
                    2, grid.size - 3))
    f = lambda kk: _casoratian(model, kk, grid, h, m)[0]
    fa, fb = f(lo), f(hi)
    if np.sign(fa) == np.sign(fb):
        # widen slightly: the node-count edge may sit a hair off the root
        d = hi - lo
        lo, hi = max(lo - 10 * d, 0.0), hi + 10 * d
        fa, fb = f(lo), f(hi)
        if np.sign(fa) == np.sign(fb):
            raise ShootingNotConverged(f"Casoratian does not change sign for state {n}")
    try:
        k = brentq(f, lo, hi, xtol=K_TOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise ShootingNotConverged(str(exc)) from exc
    _, L, R = _casoratian(model, k, grid, h, m)
    a = np.array([L[m], L[m + 1]])
    b = np.array([R[0], R[1]])
    scale = float(np.dot(a, b) / np.dot(b, b))
    psi = np.concatenate([L[:m], scale * R])
    psi = psi / np.max(np.abs(psi))
    return OracleSolution(grid, psi, float(k), OracleSource.NUMEROV,
                          {"g": _g(model, k, grid), "n": n, "match_index": m, "h": h})


def default_eigen_window(model: PotentialModel, n: int) -> tuple[float, float]:
    """Window covering state ``n`` with ``DECAY_WIDTHS`` decay lengths of margin."""
    if model.kind is PotentialKind.HARMONIC:
        w = model.omega
        k = math.sqrt((2 * n + 1) * model.hbar * w)
        x2 = k / w
        margin = DECAY_WIDTHS * math.sqrt(model.hbar / w)
        return -x2 - margin, x2 + margin
    raise ConfigError("a window is required for this potential")


def numerov_eigen(model: PotentialModel, n: int, window=None, h: float | None = None,
                  richardson: bool = True) -> OracleSolution:
    """Bound state ``n`` by node-count bracketing and Casoratian matching.

    The step defaults to ``1e-3`` of the classical well width at the
    analytic-guess energy (or of the window). With ``richardson`` the
    eigenvalue from steps ``h`` and ``h/2`` is extrapolated on ``k^2``
    (fourth-order global error).
    """
    if n < 0:
        raise ConfigError("n must be non-negative")
    lo, hi = window if window is not None else default_eigen_window(model, n)
    if h is None:
        width = hi - lo
        if model.kind is PotentialKind.HARMONIC:
            width = 2.0 * math.sqrt((2 * n + 1) * model.hbar * model.omega) / model.omega
        h = NUMEROV_REL_STEP * width
    k_hi = math.sqrt(max(float(np.max(model.momentum_sq(0.0, np.array([lo, hi])) * -1)), 1.0))

    def solve(step):
        m = int(round((hi - lo) / step))
        grid = np.linspace(lo, hi, m + 1)
        return _eigen_on_grid(model, n, grid, grid[1] - grid[0], k_hi)

    coarse = solve(h)
    if not richardson:
        return coarse
    fine = solve(0.5 * h)
    e2 = (16.0 * fine.eigen_k**2 - coarse.eigen_k**2) / 15.0
    meta = dict(fine.meta, k_h=coarse.eigen_k, k_h2=fine.eigen_k)
    return OracleSolution(fine.grid, fine.psi, math.sqrt(e2), OracleSource.NUMEROV, meta)


def airy_exact_q(model: PotentialModel, shell: EnergyShell, x):
    """Exact correction ``Q = P - p`` of the linear potential.

    ``P = -i hbar d/dx ln psi`` for the travelling combination
    ``psi = Bi(-u) + i Ai(-u)`` with ``u = a (s x + k^2/|f|)``,
    ``a = (|f|/hbar^2)^{1/3}`` and ``s = sign(f)``. This is the branch whose
    density ``|psi|^2`` decays into the forbidden region and which is the
    limit of the Riccati solution seeded deep in the classical region.
    """
    if model.kind is not PotentialKind.LINEAR or model.slope == 0:
        raise ConfigError("airy_exact_q needs a linear potential with nonzero slope")
    f = model.slope
    hbar = model.hbar
    s = 1.0 if f > 0 else -1.0
    a = (abs(f) / hbar**2) ** (1.0 / 3.0)
    xs = np.asarray(x, dtype=float)
    u = a * (s * xs + shell.k**2 / abs(f))
    ai, aip, bi, bip = airy(-u)
    P = 1j * hbar * s * a * (bip + 1j * aip) / (bi + 1j * ai)
    out = P - classical_momentum(model, shell.k, xs)
    return complex(out) if np.ndim(out) == 0 else out


def hermite_state(n: int, x, omega: float = 1.0, hbar: float = 1.0):
    """Normalized oscillator eigenstate by the stable three-term recurrence.

    ``psi_{n+1} = sqrt(2/(n+1)) xi psi_n - sqrt(n/(n+1)) psi_{n-1}`` with
    ``xi = sqrt(omega/hbar) x`` (potential ``omega^2 x^2``).
    """
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= 20:
        raise ConfigError("n must be an integer in [0, 20]")
    xi = math.sqrt(omega / hbar) * np.asarray(x, dtype=float)
    norm = (omega / hbar) ** 0.25
    prev = np.zeros_like(xi)
    cur = norm * math.pi**-0.25 * np.exp(-0.5 * xi * xi)
    for j in range(n):
        prev, cur = cur, math.sqrt(2.0 / (j + 1)) * xi * cur - math.sqrt(j / (j + 1)) * prev
    return float(cur) if np.ndim(cur) == 0 else cur


def hermite_solution(n: int, grid, omega: float = 1.0, hbar: float = 1.0) -> OracleSolution:
    grid = np.asarray(grid, dtype=float)
    k = math.sqrt((2 * n + 1) * hbar * omega)
    return OracleSolution(grid, hermite_state(n, grid, omega, hbar), k, OracleSource.HERMITE)


def analytic_ho_spectrum(n_max: int, omega: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """``k_n = sqrt((2n+1) hbar omega)`` for ``n = 0..n_max``."""
    return np.sqrt((2 * np.arange(n_max + 1) + 1) * hbar * omega)
