"""Sampled complex fields of position.

A :class:`ComplexField` stores samples of a correction function ``Q`` (or
any complex function) on a strictly increasing grid. Correction functions
have a square-root cusp at turning points because ``p`` does, while the total
momentum ``P = p + Q`` is smooth. Fields flagged with ``momentum_offset``
therefore interpolate ``P`` with a cubic Hermite spline (using ``P'``) and
subtract ``p`` afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.interpolate import BPoly, CubicHermiteSpline, CubicSpline

from .errors import ConfigError, OutOfRange
from .potential import PotentialModel, classical_momentum, momentum_derivatives


class Direction(str, Enum):
    """Integration direction of a field or wave construction."""

    LTR = "ltr"
    RTL = "rtl"

    @property
    def opposite(self) -> "Direction":
        return Direction.RTL if self is Direction.LTR else Direction.LTR


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a grid with cubic interpolation.

    Parameters
    ----------
    grid : ndarray
        Strictly increasing positions.
    values : ndarray
        Complex samples (the correction function for momentum-type fields).
    direction : Direction
        Integration direction the samples belong to.
    energy_k : float
        Energy label of the field.
    model : PotentialModel, optional
        Needed when ``momentum_offset`` is set.
    momentum_offset : bool
        Interpolate ``values + p`` and subtract ``p`` afterwards.
    smooth_derivative : ndarray, optional
        Derivative of the interpolated (smooth) quantity at the nodes; enables
        Hermite interpolation.
    smooth_second_derivative : ndarray, optional
        Second derivative of the smooth quantity at the nodes; together with
        ``smooth_derivative`` it enables quintic Hermite interpolation.
    primitive_values : ndarray, optional
        Antiderivative of the smooth quantity at the nodes (any constant).
    label : str
        Free-form provenance tag (``"riccati"``, ``"q0"``, ``"zero"``, ...).
    meta : dict
        Solver settings needed to recompute the field at another energy.
    """

    grid: np.ndarray
    values: np.ndarray
    direction: Direction
    energy_k: float
    model: PotentialModel | None = None
    momentum_offset: bool = False
    smooth_derivative: np.ndarray | None = None
    smooth_second_derivative: np.ndarray | None = None
    primitive_values: np.ndarray | None = None
    label: str = ""
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if g.ndim != 1 or g.size < 2 or v.shape != g.shape:
            raise ConfigError("grid and values must be 1-D arrays of equal length >= 2")
        if not np.all(np.diff(g) > 0):
            raise ConfigError("grid must be strictly increasing")
        if self.momentum_offset and self.model is None:
            raise ConfigError("momentum_offset requires a model")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "direction", Direction(self.direction))
        for name in ("smooth_derivative", "smooth_second_derivative", "primitive_values"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=complex)
                if arr.shape != g.shape:
                    raise ConfigError(f"{name} must match the grid")
                object.__setattr__(self, name, arr)
        for arr in (g, v):
            arr.setflags(write=False)

    # -- offsets --------------------------------------------------------------
    @property
    def hbar(self) -> float:
        return self.model.hbar if self.model is not None else 1.0

    def offset(self, x):
        if not self.momentum_offset:
            return np.zeros(np.shape(x), dtype=complex)
        return np.asarray(classical_momentum(self.model, self.energy_k, x), dtype=complex)

    def offset_derivative(self, x):
        if not self.momentum_offset:
            return np.zeros(np.shape(x), dtype=complex)
        return momentum_derivatives(self.model, self.energy_k, np.asarray(x, float), order=1)[1]

    @cached_property
    def smooth_values(self) -> np.ndarray:
        return self.values + self.offset(self.grid)

    @cached_property
    def _spline(self):
        if self.smooth_derivative is not None and self.smooth_second_derivative is not None:
            y = np.stack([self.smooth_values, self.smooth_derivative,
                          self.smooth_second_derivative], axis=1)
            return BPoly.from_derivatives(self.grid, y)
        if self.smooth_derivative is not None:
            return CubicHermiteSpline(self.grid, self.smooth_values, self.smooth_derivative)
        return CubicSpline(self.grid, self.smooth_values)

    @cached_property
    def _primitive_spline(self):
        anti = self._spline.antiderivative()
        if self.primitive_values is None:
            return anti, None
        return anti, self.primitive_values - anti(self.grid)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise OutOfRange(f"x outside field hull [{lo}, {hi}]")
        return x

    # -- evaluation -------------------------------------------------------------
    def __call__(self, x):
        """Interpolated values; exact stored samples at the nodes."""
        x = self._check(x)
        out = np.asarray(self._spline(x) - self.offset(x), dtype=complex)
        idx = np.clip(np.searchsorted(self.grid, x), 0, self.grid.size - 1)
        on_node = self.grid[idx] == x
        if np.any(on_node):
            out = np.array(out, copy=True)
            out[on_node] = self.values[idx[on_node]]
        return out if out.ndim else complex(out)

    def smooth(self, x):
        """The interpolated smooth quantity (``P`` for momentum fields)."""
        x = self._check(x)
        out = np.asarray(self._spline(x), dtype=complex)
        return out if out.ndim else complex(out)

    def smooth_prime(self, x):
        x = self._check(x)
        out = np.asarray(self._spline(x, 1), dtype=complex)
        return out if out.ndim else complex(out)

    def derivative(self, x):
        """Derivative of the field values (singular at turning points for
        momentum fields, since ``p'`` is)."""
        out = np.asarray(self.smooth_prime(x) - self.offset_derivative(x))
        return out if out.ndim else complex(out)

    def primitive(self, x):
        """Antiderivative of the smooth quantity (``int P dx`` up to a constant)."""
        x = self._check(x)
        anti, corr = self._primitive_spline
        val = anti(x)
        if corr is not None:
            # piecewise-constant correction keeps node values exact
            i = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, self.grid.size - 1)
            val = val + corr[i]
        val = np.asarray(val, dtype=complex)
        return val if val.ndim else complex(val)

    def integral(self, a, b):
        """``int_a^b`` of the smooth quantity."""
        return self.primitive(b) - self.primitive(a)

    # -- transforms ---------------------------------------------------------------
    def restrict(self, lo: float, hi: float) -> "ComplexField":
        """Sub-field on ``grid`` points within ``[lo, hi]``."""
        m = (self.grid >= lo) & (self.grid <= hi)
        return self._replace(mask=m)

    def _replace(self, mask=None, **changes) -> "ComplexField":
        kw = dict(grid=self.grid, values=self.values, direction=self.direction,
                  energy_k=self.energy_k, model=self.model,
                  momentum_offset=self.momentum_offset,
                  smooth_derivative=self.smooth_derivative,
                  smooth_second_derivative=self.smooth_second_derivative,
                  primitive_values=self.primitive_values, label=self.label,
                  meta=dict(self.meta))
        if mask is not None:
            for key in ("grid", "values", "smooth_derivative", "smooth_second_derivative",
                        "primitive_values"):
                if kw[key] is not None:
                    kw[key] = kw[key][mask]
        kw.update(changes)
        return ComplexField(**kw)

    def with_direction(self, direction: Direction) -> "ComplexField":
        """Convert between directions: ``P_rtl = conj(P_ltr)``.

        Only meaningful for momentum-type fields; the smooth part is
        conjugated and ``p`` is subtracted again.
        """
        direction = Direction(direction)
        if direction is self.direction:
            return self
        if not self.momentum_offset:
            if not np.any(self.values):
                return self._replace(direction=direction)
            raise ConfigError("direction conversion needs a momentum-type field")
        P = np.conj(self.smooth_values)
        p = self.offset(self.grid)
        sd = None if self.smooth_derivative is None else np.conj(self.smooth_derivative)
        sdd = (None if self.smooth_second_derivative is None
               else np.conj(self.smooth_second_derivative))
        pv = None if self.primitive_values is None else np.conj(self.primitive_values)
        return self._replace(values=P - p, direction=direction, smooth_derivative=sd,
                             smooth_second_derivative=sdd, primitive_values=pv)


def zero_field(model: PotentialModel, k: float, grid, direction=Direction.LTR) -> ComplexField:
    """``Q = 0`` on ``grid``: the classical limit, ``P = p``."""
    grid = np.asarray(grid, dtype=float)
    return ComplexField(grid, np.zeros(grid.size, dtype=complex), direction, k, model,
                        label="zero")


@dataclass(frozen=True, eq=False)
class RealField:
    """Real samples on a grid, optionally backed by an exact evaluator.

    ``func`` (if given) evaluates the field at arbitrary points inside the
    hull; otherwise a cubic spline through the samples is used.
    """

    grid: np.ndarray
    values: np.ndarray
    func: object = None
    label: str = ""

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or v.shape != g.shape:
            raise ConfigError("grid and values must be 1-D arrays of equal length")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise OutOfRange(f"x outside field hull [{lo}, {hi}]")
        out = np.asarray(self.func(x) if self.func is not None
                         else CubicSpline(self.grid, self.values)(x), dtype=float)
        return out if out.ndim else float(out)
