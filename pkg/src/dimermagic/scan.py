"""Parameter scans, zero-boundary bisection and tabular output.

Points are cut into fixed-size chunks in grid order.  A chunk is evaluated by
one worker with a private LP context that warm-starts each solve from the
previous point's basis.  Chunk boundaries do not depend on the worker count,
so the emitted numbers are identical for any ``workers`` value.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .dimer import DimerParams, double_occupancy, ground_state, local_rdm, thermal_state
from .l1 import DEFAULT_TOL, L1Solution
from .magic import lr_from_robustness, mixed_sre_2, robustness_solution, sre
from .quench import QuenchSpec, evolve_dephased, evolve_pure, mixing_state
from .resources import intersite_entanglement, non_gaussianity, nssr_entanglement, pssr_entanglement
from .stabilizers import load_catalog

logger = logging.getLogger(__name__)

CHUNK_SIZE = 8
FLOAT_DIGITS = 12


class ConfigError(ValueError):
    """Invalid scan configuration (bad grid, parameter or option)."""


class NoCrossingError(ValueError):
    """The LR > 0 indicator does not change along the bracket."""


@dataclass(frozen=True)
class GridSpec:
    """``n`` points from ``lo`` to ``hi`` inclusive, linear or logarithmic."""

    axis: str
    lo: float
    hi: float
    n: int
    log: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"{self.axis} grid needs at least 2 points, got {self.n}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ConfigError(f"{self.axis} grid needs min < max, got {self.lo}:{self.hi}")
        if self.log and self.lo <= 0:
            raise ConfigError(f"log-spaced {self.axis} grid needs min > 0")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


def parse_grid(text: str, axis: str = "x") -> GridSpec:
    """Parse ``min:max:n`` or ``min:max:n:log``."""
    parts = str(text).strip().split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise ConfigError(f"bad {axis} grid {text!r}; expected min:max:n[:log]")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad {axis} grid {text!r}: {exc}") from None
    return GridSpec(axis, lo, hi, n, len(parts) == 4 and parts[3] == "log")


@dataclass
class ScanRecord:
    """One grid point: parameters, observables, solver diagnostics and an error string."""

    params: dict
    values: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class LPContext:
    """Per-worker solver state: tolerance and the warm-start basis of the last solve."""

    def __init__(self, tolerance: float = DEFAULT_TOL):
        self.tolerance = tolerance
        self._last: dict[int, L1Solution] = {}

    def lr(self, state) -> tuple[float, L1Solution]:
        n = state.n_qubits
        prev = self._last.get(n)
        sol = robustness_solution(state, load_catalog(n), warm_start=prev, tolerance=self.tolerance)
        if sol.basis is not None:
            self._last[n] = sol
        return lr_from_robustness(sol.l1_norm, self.tolerance), sol

    def reset(self) -> None:
        self._last.clear()


# observables --------------------------------------------------------------

def _diag(sol: L1Solution) -> dict:
    return {"lp_iterations": sol.iterations, "lp_gap": sol.gap}


def eval_ground(ctx: LPContext, p: dict) -> tuple[dict, dict]:
    params = DimerParams(t=p.get("t", 1.0), U=p["U"])
    psi = ground_state(params)
    lr, sol = ctx.lr(psi)
    rho1 = local_rdm(psi)
    lr1, _ = ctx.lr(rho1)
    d = double_occupancy(psi)
    values = {
        "LR": lr,
        "R": sol.l1_norm,
        "M1": sre(psi, 1),
        "M2": sre(psi, 2),
        "d": d,
        "E_NSSR": nssr_entanglement(d),
        "E_PSSR": pssr_entanglement(),
        "E_vN": intersite_entanglement(psi),
        "NG_per_site": non_gaussianity(psi) / 2,
        "NG_local": non_gaussianity(rho1),
        "LR_local": lr1,
        "M2t_local": mixed_sre_2(rho1),
    }
    return values, _diag(sol)


def eval_thermal(ctx: LPContext, p: dict) -> tuple[dict, dict]:
    rho = thermal_state(DimerParams(t=p.get("t", 1.0), U=p["U"], T=p["T"]))
    lr, sol = ctx.lr(rho)
    return {"LR": lr, "d": double_occupancy(rho)}, _diag(sol)


def _quench_values(ctx: LPContext, rho) -> tuple[dict, dict]:
    lr, sol = ctx.lr(rho)
    values = {
        "LR": lr,
        "M2t": mixed_sre_2(rho),
        "d": double_occupancy(rho),
        "NG_per_site": non_gaussianity(rho) / 2,
        "NG_local": non_gaussianity(local_rdm(rho)),
        "purity": rho.purity,
    }
    return values, _diag(sol)


def eval_quench(ctx: LPContext, p: dict) -> tuple[dict, dict]:
    spec = QuenchSpec(p["Ui"], p["Uf"], p.get("t", 1.0), p.get("gamma", 0.0))
    rho = evolve_dephased(spec, p["time"]) if spec.gamma > 0 else evolve_pure(spec, p["time"])
    return _quench_values(ctx, rho)


def eval_quench_saturation(ctx: LPContext, p: dict) -> tuple[dict, dict]:
    spec = QuenchSpec(p["Ui"], p["Uf"], p.get("t", 1.0), p["gamma"])
    rho = evolve_dephased(spec, p["gamma_t"] / spec.gamma)
    lr, sol = ctx.lr(rho)
    return {"LR": lr, "M2t": mixed_sre_2(rho), "d": double_occupancy(rho)}, _diag(sol)


def eval_mix(ctx: LPContext, p: dict) -> tuple[dict, dict]:
    rho = mixing_state(p["pair"], p["lambda"], p["U"], p.get("t", 1.0))
    lr, sol = ctx.lr(rho)
    return {"LR": lr, "M2t": mixed_sre_2(rho)}, _diag(sol)


EVALUATORS: dict[str, Callable[[LPContext, dict], tuple[dict, dict]]] = {
    "ground": eval_ground,
    "thermal": eval_thermal,
    "quench": eval_quench,
    "quench_saturation": eval_quench_saturation,
    "mix": eval_mix,
}

COLUMNS = {
    "ground": ["LR", "R", "M1", "M2", "d", "E_NSSR", "E_PSSR", "E_vN", "NG_per_site", "NG_local", "LR_local", "M2t_local"],
    "thermal": ["LR", "d"],
    "quench": ["LR", "M2t", "d", "NG_per_site", "NG_local", "purity"],
    "quench_saturation": ["LR", "M2t", "d"],
    "mix": ["LR", "M2t"],
}


# execution ------------------------------------------------------------------

def _run_chunk(kind: str, points: list[dict], tolerance: float) -> list[ScanRecord]:
    ctx = LPContext(tolerance)
    fn = EVALUATORS[kind]
    out = []
    for p in points:
        try:
            values, diag = fn(ctx, p)
            out.append(ScanRecord(dict(p), values, diag))
        except Exception as exc:  # one bad point never aborts the scan
            logger.warning("point %s failed: %s", p, exc)
            ctx.reset()
            out.append(ScanRecord(dict(p), {c: math.nan for c in COLUMNS[kind]}, {}, f"{type(exc).__name__}: {exc}"))
    return out


def run_points(kind: str, points: Sequence[dict], workers: int = 1, tolerance: float = DEFAULT_TOL) -> list[ScanRecord]:
    """Evaluate ``points`` and return records in input order."""
    if kind not in EVALUATORS:
        raise ConfigError(f"unknown scan kind {kind!r}")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    if tolerance <= 0:
        raise ConfigError("LP tolerance must be positive")
    points = [dict(p) for p in points]
    chunks = [points[i:i + CHUNK_SIZE] for i in range(0, len(points), CHUNK_SIZE)]
    # make sure every catalog a scan may need exists before forking
    load_catalog(2)
    load_catalog(4)
    if workers == 1 or len(chunks) <= 1:
        return [r for c in chunks for r in _run_chunk(kind, c, tolerance)]
    records: list[ScanRecord] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, kind, c, tolerance) for c in chunks]
        for chunk, fut in zip(chunks, futures):
            try:
                records.extend(fut.result())
            except Exception as exc:  # worker died; mark its points failed
                err = f"{type(exc).__name__}: {exc}"
                records.extend(ScanRecord(dict(p), {c: math.nan for c in COLUMNS[kind]}, {}, err) for p in chunk)
    return records


# scans ----------------------------------------------------------------------

def ground_scan(U_values: Iterable[float], t: float = 1.0, workers: int = 1, tolerance: float = DEFAULT_TOL) -> list[ScanRecord]:
    """Zero-temperature observables along a U grid."""
    pts = [{"t": t, "U": float(u)} for u in U_values]
    return run_points("ground", pts, workers, tolerance)


def thermal_scan(
    U_values: Iterable[float], T_values: Iterable[float], t: float = 1.0, workers: int = 1, tolerance: float = DEFAULT_TOL
) -> list[ScanRecord]:
    """LR and double occupancy on the U x T grid (U-major order)."""
    T_values = [float(x) for x in T_values]
    pts = [{"t": t, "U": float(u), "T": T} for u in U_values for T in T_values]
    return run_points("thermal", pts, workers, tolerance)


def quench_run(
    spec: QuenchSpec, times: Iterable[float], workers: int = 1, tolerance: float = DEFAULT_TOL
) -> list[ScanRecord]:
    """Time series after the quench ``spec``."""
    pts = [{"t": spec.t_hop, "Ui": spec.U_i, "Uf": spec.U_f, "gamma": spec.gamma, "time": float(x)} for x in times]
    return run_points("quench", pts, workers, tolerance)


DEFAULT_GAMMA = 0.1
SATURATION_GAMMA_T = 10.0


def quench_saturation_scan(
    Ui_values: Iterable[float],
    Uf_values: Iterable[float],
    gamma: float = DEFAULT_GAMMA,
    gamma_t: float = SATURATION_GAMMA_T,
    t: float = 1.0,
    workers: int = 1,
    tolerance: float = DEFAULT_TOL,
) -> list[ScanRecord]:
    """LR after a transient ``gamma * time = gamma_t`` on the ``U_i x U_f`` grid."""
    if gamma <= 0:
        raise ConfigError("saturation scan needs gamma > 0")
    Uf_values = [float(x) for x in Uf_values]
    pts = [
        {"t": t, "Ui": float(ui), "Uf": uf, "gamma": gamma, "gamma_t": gamma_t}
        for ui in Ui_values
        for uf in Uf_values
    ]
    return run_points("quench_saturation", pts, workers, tolerance)


def mixing_scan(
    pair: str, U: float, lambdas: Iterable[float], t: float = 1.0, workers: int = 1, tolerance: float = DEFAULT_TOL
) -> list[ScanRecord]:
    """LR along ``lam |X><X| + (1 - lam) |psi_-><psi_-|``."""
    pts = [{"t": t, "pair": pair, "U": U, "lambda": float(x)} for x in lambdas]
    return run_points("mix", pts, workers, tolerance)


def argmax_ridge(records: Sequence[ScanRecord], row_axis: str = "T", col_axis: str = "U", value: str = "LR") -> dict:
    """For each ``row_axis`` value, the ``col_axis`` value maximizing ``value`` (None if all zero)."""
    best: dict = {}
    for r in records:
        if r.failed:
            continue
        key = r.params[row_axis]
        v = r.values[value]
        if v > 0 and (key not in best or v > best[key][1]):
            best[key] = (r.params[col_axis], v)
    rows = sorted({r.params[row_axis] for r in records})
    return {k: (best[k][0] if k in best else None) for k in rows}


# boundaries -----------------------------------------------------------------

@dataclass
class Boundary:
    value: float
    bracket: tuple[float, float]
    coarse: list[tuple[float, bool]]


def critical_boundary(
    indicator: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-4, coarse_points: int = 21
) -> Boundary:
    """Last change of ``indicator`` on ``[lo, hi]``, located to within ``tol``.

    A coarse scan finds every change of the indicator (it need not be
    monotone); the largest one is then bisected.  Raises
    :class:`NoCrossingError` when the indicator is constant on the coarse grid.
    """
    if not lo < hi:
        raise ConfigError("bracket needs lo < hi")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    xs = np.linspace(lo, hi, coarse_points)
    flags = [bool(indicator(float(x))) for x in xs]
    changes = [i for i in range(len(xs) - 1) if flags[i] != flags[i + 1]]
    if not changes:
        raise NoCrossingError(f"indicator is {flags[0]} everywhere on [{lo}, {hi}]")
    i = changes[-1]
    a, b = float(xs[i]), float(xs[i + 1])
    fa = flags[i]
    while b - a > tol:
        mid = 0.5 * (a + b)
        if bool(indicator(mid)) == fa:
            a = mid
        else:
            b = mid
    return Boundary(0.5 * (a + b), (float(xs[i]), float(xs[i + 1])), list(zip(map(float, xs), flags)))


def lr_positive(state, tolerance: float = DEFAULT_TOL) -> bool:
    """Indicator ``LR > 0`` after the zero clamp."""
    sol = robustness_solution(state, tolerance=tolerance)
    return lr_from_robustness(sol.l1_norm, tolerance) > 0


def critical_temperature(
    U: float, T_lo: float = 0.0, T_hi: float = 10.0, tol: float = 1e-4, t: float = 1.0,
    coarse_points: int = 21, tolerance: float = DEFAULT_TOL,
) -> Boundary:
    """``T_c(U)``: the largest temperature where LR of the thermal state drops to 0."""
    return critical_boundary(
        lambda T: lr_positive(thermal_state(DimerParams(t=t, U=U, T=T)), tolerance), T_lo, T_hi, tol, coarse_points
    )


def critical_lambda(
    pair: str, U: float, lo: float = 0.0, hi: float = 1.0, tol: float = 1e-4, t: float = 1.0,
    coarse_points: int = 21, tolerance: float = DEFAULT_TOL,
) -> Boundary:
    """Last LR zero crossing of a mixing family on ``[lo, hi]``."""
    return critical_boundary(
        lambda lam: lr_positive(mixing_state(pair, lam, U, t), tolerance), lo, hi, tol, coarse_points
    )


def zero_interval(
    pair: str, U: float, tol: float = 1e-4, t: float = 1.0, coarse_points: int = 21, tolerance: float = DEFAULT_TOL
) -> tuple[float, float]:
    """``(lambda_c, lambda_c')``: ends of the LR = 0 window, searched on each half of [0, 1]."""
    left = critical_lambda(pair, U, 0.0, 0.5, tol, t, coarse_points, tolerance).value
    right = critical_lambda(pair, U, 0.5, 1.0, tol, t, coarse_points, tolerance).value
    return left, right


# output ---------------------------------------------------------------------

def format_float(v: float) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == 0:
        return "0"
    return f"{v:.{FLOAT_DIGITS}g}"


def _round(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        return float(format_float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def record_columns(records: Sequence[ScanRecord]) -> list[str]:
    cols: list[str] = []
    for part in ("params", "values", "diagnostics"):
        for r in records:
            for k in getattr(r, part):
                if k not in cols:
                    cols.append(k)
    return cols + ["error"]


def render_records(records: Sequence[ScanRecord], fmt: str = "csv") -> str:
    """CSV with a header row, or one JSON object per line (``"records"``)."""
    cols = record_columns(records)
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            merged = {**r.params, **r.values, **r.diagnostics}
            w.writerow([format_float(merged[c]) if c in merged else "" for c in cols[:-1]] + [r.error or ""])
    elif fmt == "records":
        for r in records:
            obj = {
                "params": {k: _round(v) for k, v in r.params.items()},
                "values": {k: _round(v) for k, v in r.values.items()},
                "diagnostics": {k: _round(v) for k, v in r.diagnostics.items()},
                "error": r.error,
            }
            buf.write(json.dumps(obj, sort_keys=False) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    return buf.getvalue()


def write_records(records: Sequence[ScanRecord], path: str | None = None, fmt: str = "csv") -> None:
    text = render_records(records, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)
