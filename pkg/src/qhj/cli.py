"""Command-line interface.

Subcommands write plot-ready CSV (default) or JSON to ``--out`` or stdout:

=================  ===========================================
command            CSV columns
=================  ===========================================
qcorr              x,p,reQ0,imQ0,reQ,imQ,reP
spectrum           k,quant,maslov4 (eigenvalues in a JSON sidecar)
trajectory         t,x,branch
timeshift          k,dt,dt_fwd,dt_bwd
wave               x,psi,envelope,phase[,psi_wkb][,psi_oracle]
oracle-compare     case,max_dev,tol,passed
=================  ===========================================

Exit codes: 0 success, 1 oracle tolerance exceeded, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ConfigError, NoTurningPoint, QHJError
from .fields import Direction

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("qcorr", "spectrum", "trajectory", "timeshift", "wave", "oracle-compare")
ORACLE_CASES = ("linear-q", "linear-q0", "ho-spectrum")
DEFAULT_TOL = {"linear-q": 1e-5, "linear-q0": 1e-6, "ho-spectrum": 1e-3}
COMPARE_CHOICES = {"wave": ("wkb", "oracle", "both"), "trajectory": ("apparent", "classical")}
FORMAT_VERSION = 1

# JSON document schemas (draft 2020-12)
_NUM = {"type": ["number", "null"]}
_ROWS = {"type": "array", "items": {"type": "object"}}
JSON_SCHEMAS = {
    cmd: {
        "type": "object",
        "required": ["command", "format_version", "config", "columns", "rows"],
        "properties": {
            "command": {"const": cmd},
            "format_version": {"const": FORMAT_VERSION},
            "config": {"type": "object"},
            "columns": {"type": "array", "items": {"type": "string"}},
            "rows": _ROWS,
            "meta": {"type": "object"},
        },
    }
    for cmd in COMMANDS
}
JSON_SCHEMAS["spectrum"]["required"] = JSON_SCHEMAS["spectrum"]["required"] + ["eigen_k"]
JSON_SCHEMAS["spectrum"]["properties"]["eigen_k"] = {"type": "array", "items": {"type": "number"}}
JSON_SCHEMAS["spectrum"]["properties"]["labels"] = {"type": "array", "items": {"type": "integer"}}
EIGEN_SCHEMA = {
    "type": "object",
    "required": ["eigen_k", "labels", "maslov4"],
    "properties": {
        "eigen_k": {"type": "array", "items": {"type": "number"}},
        "labels": {"type": "array", "items": {"type": "integer"}},
        "maslov4": {"type": "array", "items": {"type": "number"}},
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Validated command configuration; round-trips through :meth:`to_dict`."""

    command: str
    potential: str = "harmonic"
    f: float = 1.0
    omega: float = 1.0
    coeffs: tuple[float, ...] | None = None
    hbar: float = 1.0
    k: float | None = None
    k_range: tuple[float, float, int] | None = None
    window: tuple[float, float] | None = None
    grid: int = 401
    direction: str = "ltr"
    format: str = "csv"
    out: str | None = None
    compare: str | None = None
    periods: int = 2
    case: str | None = None
    matching: str = "full"
    tol: float | None = None
    workers: int = 1

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------------------
    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.potential not in ("linear", "harmonic", "poly"):
            raise ConfigError("--potential must be linear, harmonic or poly")
        if self.potential == "poly" and not self.coeffs:
            raise ConfigError("--potential poly needs --coeffs")
        if self.potential == "linear" and self.f == 0:
            raise ConfigError("--f must be nonzero")
        if self.potential == "harmonic" and self.omega <= 0:
            raise ConfigError("--omega must be positive")
        if not self.hbar > 0:
            raise ConfigError("--hbar must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        if self.direction not in ("ltr", "rtl"):
            raise ConfigError("--direction must be ltr or rtl")
        if self.grid < 2:
            raise ConfigError("--grid must be at least 2")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ConfigError("--window must satisfy lo < hi")
        if self.k is not None and (not math.isfinite(self.k) or self.k < 0):
            raise ConfigError("--k must be finite and non-negative")
        if self.k_range is not None:
            lo, hi, n = self.k_range
            if not (0 < lo < hi) or n < 2:
                raise ConfigError("--k-range needs 0 < lo < hi and n >= 2")
        needs_k = self.command in ("qcorr", "trajectory", "wave")
        needs_range = self.command in ("spectrum", "timeshift")
        if needs_k and self.k is None and not (self.command in ("qcorr", "wave")
                                               and self.potential == "linear"):
            raise ConfigError(f"{self.command} needs --k")
        if needs_range and self.k_range is None:
            raise ConfigError(f"{self.command} needs --k-range lo:hi:n")
        if self.command in ("trajectory", "timeshift") and self.potential == "linear":
            raise ConfigError(f"{self.command} needs a potential well")
        if self.command == "trajectory":
            if not 1 <= self.periods <= 100:
                raise ConfigError("--periods must be in [1, 100]")
            if self.compare == "apparent" and self.potential != "harmonic":
                raise ConfigError("--compare apparent needs the harmonic potential")
        if self.compare is not None:
            allowed = COMPARE_CHOICES.get(self.command, ())
            if self.compare not in allowed:
                raise ConfigError(f"--compare for {self.command} must be one of {allowed}")
        if self.command == "oracle-compare" and self.case not in ORACLE_CASES:
            raise ConfigError(f"--case must be one of {ORACLE_CASES}")
        if self.matching not in ("full", "imag"):
            raise ConfigError("--matching must be full or imag")
        if self.workers < 1:
            raise ConfigError("--workers must be positive")

    # -- serialization ---------------------------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("coeffs", "k_range", "window"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        for key in ("coeffs", "window"):
            if d.get(key) is not None:
                d[key] = tuple(float(v) for v in d[key])
        if d.get("k_range") is not None:
            lo, hi, n = d["k_range"]
            d["k_range"] = (float(lo), float(hi), int(n))
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    # -- derived ----------------------------------------------------------------------------
    def model(self):
        from .potential import PotentialModel

        if self.potential == "linear":
            return PotentialModel.linear(self.f, self.hbar)
        if self.potential == "harmonic":
            return PotentialModel.harmonic(self.omega, self.hbar)
        return PotentialModel.polynomial(self.coeffs, self.hbar)

    @property
    def energy_k(self) -> float:
        return 0.0 if self.k is None else self.k

    def k_grid(self) -> np.ndarray:
        lo, hi, n = self.k_range
        return np.linspace(lo, hi, n)


# -- output --------------------------------------------------------------------------------------
def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    sidecar: dict | None = None


def render(cfg: RunConfig, table: Table) -> str:
    """Deterministic CSV or JSON text of ``table``."""
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    rows = [{c: (_num(v) if not isinstance(v, (str, bool, np.bool_, int, np.integer))
                 else (bool(v) if isinstance(v, (bool, np.bool_)) else
                       int(v) if isinstance(v, (int, np.integer)) else v))
             for c, v in zip(table.columns, row)} for row in table.rows]
    doc = {"command": cfg.command, "format_version": FORMAT_VERSION, "config": cfg.to_dict(),
           "columns": list(table.columns), "rows": rows, "meta": _jsonable(table.meta)}
    if table.sidecar is not None:
        doc.update(_jsonable(table.sidecar))
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def write_output(cfg: RunConfig, table: Table) -> None:
    text = render(cfg, table)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if cfg.format == "csv" and table.sidecar is not None:
        side = json.dumps(_jsonable(table.sidecar), sort_keys=True, indent=1) + "\n"
        if cfg.out is None:
            sys.stderr.write(side)
        else:
            with open(cfg.out + ".eigen.json", "w", encoding="utf-8") as fh:
                fh.write(side)


# -- commands -----------------------------------------------------------------------------------------
def _shell(cfg: RunConfig, model, k):
    from .potential import find_turning_points

    return find_turning_points(model, k, cfg.window or model.default_window(k))


def _out_grid(cfg: RunConfig, shell):
    return np.linspace(shell.window[0], shell.window[1], cfg.grid)


def cmd_qcorr(cfg: RunConfig) -> Table:
    """Phase-space data: ``p``, ``Q0``, ``Q`` and ``Re P`` on a uniform grid."""
    from .potential import classical_momentum
    from .qcf import GridSpec, q0_quadrature, solve_q_selfconsistent

    model = cfg.model()
    k = cfg.energy_k
    shell = _shell(cfg, model, k)
    xs = _out_grid(cfg, shell)
    spec = GridSpec(window=shell.window, extra_points=tuple(xs))
    q = solve_q_selfconsistent(model, shell, grid_spec=spec)
    if model.is_constant or shell.turning_points:
        q0 = q0_quadrature(model, shell, grid_spec=spec)(xs)
    else:
        warnings.warn("no turning point in the window: Q0 columns set to zero", RuntimeWarning)
        q0 = np.zeros(xs.size, dtype=complex)
    Q = q(xs)
    p = classical_momentum(model, k, xs)
    rows = [(x, pi.real, a.real, a.imag, b.real, b.imag, (pi + b).real)
            for x, pi, a, b in zip(xs, p, q0, Q)]
    return Table(["x", "p", "reQ0", "imQ0", "reQ", "imQ", "reP"], rows,
                 meta={"k": k, "turning_points": list(shell.turning_points)})


def cmd_spectrum(cfg: RunConfig) -> Table:
    """Quantization curve, Maslov curve and eigenvalues."""
    from .spectrum import quantization_curve

    model = cfg.model()
    res = quantization_curve(model, cfg.k_grid(), window=cfg.window, matching=cfg.matching,
                             workers=cfg.workers)
    if res.eigen_k.size == 0:
        warnings.warn("no eigenvalue inside the scanned k-range", RuntimeWarning)
    rows = list(zip(res.k_grid, res.quant_curve, res.maslov_curve))
    side = {"eigen_k": res.eigen_k.tolist(), "labels": res.labels.tolist(),
            "maslov4": res.maslov_at_eigen.tolist()}
    return Table(["k", "quant", "maslov4"], rows, meta=res.meta, sidecar=side)


def cmd_trajectory(cfg: RunConfig) -> Table:
    """Trajectory branches ``t, x, branch``; extra curves use negative labels
    (``-1`` apparent continuation, ``-2`` classical trajectory)."""
    from .dynamics import apparent_continuation_ho, assemble_branches
    from .fields import zero_field
    from .qcf import solve_q_selfconsistent

    model = cfg.model()
    shell = _shell(cfg, model, cfg.energy_k)
    q = solve_q_selfconsistent(model, shell)
    br = assemble_branches(model, shell, q, cfg.periods, n_samples=cfg.grid)
    rows = []
    for j, b in enumerate(br.branches):
        rows.extend((t, x, j) for t, x in zip(b.t, b.x))
    if cfg.compare == "apparent":
        ap = apparent_continuation_ho(br, model, shell)
        rows.extend((t, x, -1) for t, x in zip(ap.t, ap.x))
    elif cfg.compare == "classical":
        cl = assemble_branches(model, shell, zero_field(model, shell.k, q.grid), cfg.periods,
                               n_samples=cfg.grid)
        for b in cl.branches:
            rows.extend((t, x, -2) for t, x in zip(b.t, b.x))
    return Table(["t", "x", "branch"], rows,
                 meta={"delta_t": br.delta_t, "gap": br.gap, "period_T": br.period_T})


def cmd_timeshift(cfg: RunConfig) -> Table:
    """Total time-shift and its decomposition over a k-range."""
    from .dynamics import time_shift_total
    from .qcf import solve_q_selfconsistent

    model = cfg.model()
    rows = []
    for k in cfg.k_grid():
        shell = _shell(cfg, model, k)
        if shell.n_turning != 2:
            raise ConfigError(f"k = {k} is outside the two-turning-point regime")
        ts = time_shift_total(model, shell, solve_q_selfconsistent(model, shell))
        rows.append((k, ts.dt, ts.dt_fwd, ts.dt_bwd))
    return Table(["k", "dt", "dt_fwd", "dt_bwd"], rows)


def cmd_wave(cfg: RunConfig) -> Table:
    """Wave function from the self-consistent correction, with optional WKB
    and oracle comparison columns (each scaled to the QCF wave by least
    squares on the classical region)."""
    from .oracle import airy_exact_q, hermite_state, numerov_solve  # noqa: F401
    from .potential import PotentialKind
    from .qcf import GridSpec, decaying_field, solve_q_selfconsistent
    from .spectrum import reflection_phase
    from .wavefn import build_wave_ltr, build_wave_rtl, continue_decaying, wkb_wave

    model = cfg.model()
    k = cfg.energy_k
    shell = _shell(cfg, model, k)
    if not shell.turning_points:
        raise NoTurningPoint("wave construction needs a turning point in the window")
    lo, hi = shell.window
    xs = _out_grid(cfg, shell)
    extra = [t + s * 10.0**-j * max(1.0, abs(t))
             for t in shell.turning_points for s in (-1, 1) for j in range(1, 16)]
    xs = np.unique(np.concatenate([xs, [x for x in extra if lo <= x <= hi]]))
    spec = GridSpec(window=shell.window, extra_points=tuple(xs))
    q = solve_q_selfconsistent(model, shell, grid_spec=spec)
    direction = Direction(cfg.direction)
    sides = []
    tps = shell.turning_points
    if len(tps) == 2:
        sides = ["left", "right"]
    else:
        sides = ["left" if model.momentum_sq(k, tps[0] - 1e-6) < 0 else "right"]
    outers = {s: decaying_field(model, shell, s, spec) for s in sides}
    if direction is Direction.LTR:
        side = "left" if "left" in outers else sides[0]
        rp = reflection_phase(q, outers[side], shell, x_ref=tps[0])
        wave = build_wave_ltr(q, shell, rp.phi_total)
    else:
        side = "right" if "right" in outers else sides[0]
        rp = reflection_phase(q, outers[side], shell, x_ref=tps[-1])
        wave = build_wave_rtl(q.with_direction(Direction.RTL), shell, rp.phi_total)
    for o in outers.values():
        wave = continue_decaying(wave, o)
    psi = wave(xs)
    env = np.interp(xs, wave.grid, wave.envelope)
    ph = np.interp(xs, wave.grid, wave.phase)
    # node values are exact; interpolation only matters off the wave grid
    idx = np.searchsorted(wave.grid, xs)
    idx = np.clip(idx, 0, wave.grid.size - 1)
    on = wave.grid[idx] == xs
    psi[on], env[on], ph[on] = wave.psi[idx[on]], wave.envelope[idx[on]], wave.phase[idx[on]]
    columns = ["x", "psi", "envelope", "phase"]
    cols = [xs, psi, env, ph]
    anchor = wave.anchor
    classical = np.real(model.momentum_sq(k, xs)) > 0

    def scaled(ref):
        m = classical & np.isfinite(ref)
        for t in tps:
            m &= np.abs(xs - t) > 0.5 * (model.hbar**2 / abs(model.U(t, 1))) ** (1 / 3)
        c = np.dot(ref[m], psi[m]) / np.dot(ref[m], ref[m])
        return c * ref

    if cfg.compare in ("wkb", "both"):
        columns.append("psi_wkb")
        cols.append(scaled(wkb_wave(model, shell, anchor, xs)))
    if cfg.compare in ("oracle", "both"):
        columns.append("psi_oracle")
        cols.append(scaled(_oracle_wave(model, shell, xs)))
    return Table(columns, list(zip(*cols)),
                 meta={"k": k, "phi": rp.phi_total, "phi_invariant": rp.phi_invariant,
                       "anchor": anchor, "turning_points": list(tps)})


def _oracle_wave(model, shell, xs):
    from .oracle import hermite_state, numerov_solve
    from .potential import PotentialKind
    from .specfun import airy_ai

    k = shell.k
    if model.kind is PotentialKind.LINEAR:
        f = model.slope
        a = (abs(f) / model.hbar**2) ** (1.0 / 3.0)
        u = a * (np.sign(f) * xs + k * k / abs(f))
        return airy_ai(-u)
    if model.kind is PotentialKind.HARMONIC:
        n = (k * k / (model.hbar * model.omega) - 1.0) / 2.0
        if abs(n - round(n)) < 1e-6 and 0 <= round(n) <= 20:
            return hermite_state(int(round(n)), xs, model.omega, model.hbar)
    g = np.linspace(xs[0], xs[-1], 20001)
    sol = numerov_solve(model, k, g, "left")
    return np.interp(xs, g, sol.psi)


def cmd_oracle_compare(cfg: RunConfig) -> Table:
    """Mutual-oracle checks; the caller exits 1 if any deviation exceeds its
    tolerance."""
    from .potential import PotentialModel, find_turning_points
    from .qcf import GridSpec, q0_closed_form_linear, q0_quadrature, solve_q_selfconsistent

    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL[cfg.case]
    meta = {}
    if cfg.case == "linear-q":
        from .oracle import airy_exact_q

        model = PotentialModel.linear(cfg.f, cfg.hbar)
        shell = find_turning_points(model, cfg.energy_k, model.default_window(cfg.energy_k))
        x_t = shell.turning_points[0]
        s = 1.0 if cfg.f > 0 else -1.0
        lo, hi = sorted((x_t - 2 * s, x_t + 10 * s))
        win = (min(lo, shell.window[0]), max(hi, shell.window[1]))
        shell = find_turning_points(model, cfg.energy_k, win)
        q = solve_q_selfconsistent(model, shell, grid_spec=GridSpec(window=win))
        xs = q.grid[(q.grid >= lo) & (q.grid <= hi)]
        dev = float(np.max(np.abs(q(xs) - airy_exact_q(model, shell, xs))))
    elif cfg.case == "linear-q0":
        model = PotentialModel.linear(cfg.f, cfg.hbar)
        shell = find_turning_points(model, cfg.energy_k, model.default_window(cfg.energy_k))
        xs = shell.turning_points[0] + np.sign(cfg.f) * np.array([0.5, 1.0, 2.0, 5.0])
        q0 = q0_quadrature(model, shell)
        closed = np.array([q0_closed_form_linear(model, shell, x) for x in xs])
        dev = float(np.max(np.abs(q0(xs) - closed)))
    else:
        from .oracle import numerov_eigen
        from .spectrum import quantization_curve

        model = PotentialModel.harmonic(cfg.omega, cfg.hbar)
        kr = cfg.k_range or (0.5 * math.sqrt(model.hbar * cfg.omega),
                             math.sqrt(11.5 * model.hbar * cfg.omega), 400)
        res = quantization_curve(model, np.linspace(*kr), workers=cfg.workers)
        ref = np.array([numerov_eigen(model, int(n)).eigen_k for n in res.labels])
        dev = float(np.max(np.abs(res.eigen_k**2 - ref**2))) if ref.size else float("inf")
        meta["eigen_k"] = res.eigen_k.tolist()
    passed = dev < tol
    return Table(["case", "max_dev", "tol", "passed"], [(cfg.case, dev, tol, passed)],
                 meta=dict(meta, passed=passed))


HANDLERS = {"qcorr": cmd_qcorr, "spectrum": cmd_spectrum, "trajectory": cmd_trajectory,
            "timeshift": cmd_timeshift, "wave": cmd_wave, "oracle-compare": cmd_oracle_compare}


# -- argument parsing ------------------------------------------------------------------------------
def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return lo, hi


def _krange(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None


def _coeffs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", choices=("linear", "harmonic", "poly"), default="harmonic")
    common.add_argument("--f", type=float, default=1.0, help="slope of U = -f x")
    common.add_argument("--omega", type=float, default=1.0, help="U = omega^2 x^2")
    common.add_argument("--coeffs", type=_coeffs, help="ascending polynomial coefficients a0,a1,...")
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--k", type=float, help="wavenumber, E = k^2/2")
    common.add_argument("--k-range", dest="k_range", type=_krange, help="lo:hi:n")
    common.add_argument("--window", type=_pair, help="lo:hi (use --window=-6:12 for negatives)")
    common.add_argument("--grid", type=int, default=401, help="output grid points")
    common.add_argument("--direction", choices=("ltr", "rtl"), default="ltr")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--matching", choices=("full", "imag"), default="full")
    common.add_argument("--workers", type=int, default=1)
    parser = argparse.ArgumentParser(
        prog="qhj", description="Quantum Hamilton-Jacobi solver for 1-D stationary problems.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("qcorr", parents=[common], help="quantum correction functions")
    sub.add_parser("spectrum", parents=[common], help="quantization and Maslov curves")
    p = sub.add_parser("trajectory", parents=[common], help="quantum trajectory branches")
    p.add_argument("--periods", type=int, default=2)
    p.add_argument("--compare", choices=COMPARE_CHOICES["trajectory"])
    sub.add_parser("timeshift", parents=[common], help="total time-shift over a k-range")
    p = sub.add_parser("wave", parents=[common], help="wave function")
    p.add_argument("--compare", choices=COMPARE_CHOICES["wave"])
    p = sub.add_parser("oracle-compare", parents=[common], help="mutual-oracle checks")
    p.add_argument("--case", choices=ORACLE_CASES, required=True)
    p.add_argument("--tol", type=float)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = {f.name: getattr(ns, f.name) for f in fields(RunConfig) if hasattr(ns, f.name)}
    return RunConfig(**{k: v for k, v in d.items() if v is not None or k in ("k",)})


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = HANDLERS[cfg.command](cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        write_output(cfg, table)
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (ConfigError, NoTurningPoint) as exc:
        print(f"error [{ns.command}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QHJError as exc:
        print(f"numerical failure [{ns.command}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.command == "oracle-compare" and not table.meta.get("passed", False):
        print(f"oracle deviation {table.rows[0][1]:.3e} exceeds tolerance {table.rows[0][2]:.1e}",
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
