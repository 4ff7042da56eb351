"""Command-line driver.

Every option can also come from a JSON config file (``--config``); keys are the
long option names with dashes or underscores.  Command-line values win.

Exit codes: 0 success, 1 configuration error, 2 some points failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import kernels
from .l1 import DEFAULT_TOL
from .magic import MixedStateError, lr_from_robustness, mixed_sre_2, robustness_solution, sre
from .quench import MIXING_PAIRS, QuenchSpec, time_grid
from .scan import (
    DEFAULT_GAMMA,
    SATURATION_GAMMA_T,
    ConfigError,
    NoCrossingError,
    ScanRecord,
    critical_lambda,
    critical_temperature,
    ground_scan,
    mixing_scan,
    parse_grid,
    quench_run,
    quench_saturation_scan,
    thermal_scan,
    write_records,
)
from .stabilizers import CACHE_ENV, MAX_QUBITS, CatalogError, cache_dir, rebuild_cache
from .states import InvalidStateError, load_state

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2
MIX_U = 4.0

logger = logging.getLogger("dimermagic")

# built-in defaults, lowest precedence
DEFAULTS = {
    "t": 1.0,
    "U": None,  # mix falls back to MIX_U; thermal-scan uses the U grid
    "T": None,
    "gamma": 0.0,
    "Ui": 100.0,
    "Uf": 5.0,
    "U_grid": "0.1:100:40:log",
    "T_grid": "0.01:10:40",
    "lambda_grid": "0:1:101",
    "Ui_grid": "0:20:21",
    "Uf_grid": "0:20:21",
    "time_grid": None,
    "pair": "plus",
    "gamma_t": SATURATION_GAMMA_T,
    "out": "-",
    "format": "csv",
    "workers": 1,
    "lp_tol": DEFAULT_TOL,
    "boundary_out": None,
    "boundary_tol": 1e-4,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--t", type=float, help="hopping amplitude (energy unit)")
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "records"), help="csv (default) or one JSON record per line")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--lp-tol", dest="lp_tol", type=float, help="LP feasibility / gap tolerance")
    p.add_argument("-v", "--verbose", action="store_true", default=None, help="log solver diagnostics")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dimermagic", description="Magic and related resources of the Hubbard dimer.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ground", help="zero-temperature observables along a U grid")
    _common(p)
    p.add_argument("--U-grid", dest="U_grid", help="min:max:n[:log]")

    p = sub.add_parser("thermal-scan", help="LR and <d> on a U x T grid")
    _common(p)
    p.add_argument("--U-grid", dest="U_grid")
    p.add_argument("--T-grid", dest="T_grid")
    p.add_argument("--U", type=float, help="single U value instead of the U grid")
    p.add_argument("--T", type=float, help="single temperature instead of the T grid")
    p.add_argument("--boundary-out", dest="boundary_out", help="also write T_c(U) bisections here")
    p.add_argument("--boundary-tol", dest="boundary_tol", type=float)

    p = sub.add_parser("quench", help="time series after a U_i -> U_f quench")
    _common(p)
    p.add_argument("--Ui", type=float)
    p.add_argument("--Uf", type=float)
    p.add_argument("--gamma", type=float, help="dephasing rate")
    p.add_argument("--time-grid", dest="time_grid", help="min:max:n (default: 400 points over 6 periods)")

    p = sub.add_parser("quench-scan", help="LR after a dephasing transient on a U_i x U_f grid")
    _common(p)
    p.add_argument("--Ui-grid", dest="Ui_grid")
    p.add_argument("--Uf-grid", dest="Uf_grid")
    p.add_argument("--gamma", type=float, help=f"dephasing rate (default {DEFAULT_GAMMA})")
    p.add_argument("--gamma-t", dest="gamma_t", type=float, help="transient gamma * time (default 10)")

    p = sub.add_parser("mix", help="LR along a linear mixing family")
    _common(p)
    p.add_argument("--U", type=float, help=f"interaction (default {MIX_U})")
    p.add_argument("--pair", choices=MIXING_PAIRS, help="mix psi_- with psi_+ ('plus') or with D")
    p.add_argument("--lambda-grid", dest="lambda_grid")
    p.add_argument("--boundary-out", dest="boundary_out", help="also write the LR = 0 window ends here")
    p.add_argument("--boundary-tol", dest="boundary_tol", type=float)

    p = sub.add_parser("rom", help="magic measures of a state read from a file")
    _common(p)
    p.add_argument("--state", required=False, help="JSON state file")

    p = sub.add_parser("catalog", help="build and cache the stabilizer A-matrix")
    _common(p)
    p.add_argument("--build", type=int, help=f"qubit count 1..{MAX_QUBITS}")
    return parser


def resolve_options(argv: list[str] | None = None) -> dict:
    """Parse ``argv``, then merge defaults < config file < command line."""
    args = build_parser().parse_args(argv)
    cli = {k: v for k, v in vars(args).items() if v is not None}
    config: dict = {}
    if "config" in cli:
        path = Path(cli.pop("config"))
        try:
            raw = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        known = set(DEFAULTS) | {"command", "verbose", "state", "build"}
        for key, val in raw.items():
            k = key.replace("-", "_")
            if k not in known:
                raise ConfigError(f"unknown config key {key!r}")
            config[k] = val
        if "command" in config and config.pop("command") != cli["command"]:
            raise ConfigError("config 'command' does not match the subcommand")
    opts = {**DEFAULTS, **config, **cli}
    for key in ("t", "U", "T", "gamma", "Ui", "Uf", "gamma_t", "lp_tol", "boundary_tol"):
        if opts[key] is None:
            continue
        try:
            opts[key] = float(opts[key])
        except (TypeError, ValueError):
            raise ConfigError(f"option {key} must be a number, got {opts[key]!r}") from None
        if not math.isfinite(opts[key]):
            raise ConfigError(f"option {key} must be finite")
    if opts["lp_tol"] <= 0:
        raise ConfigError("--lp-tol must be positive")
    try:
        opts["workers"] = int(opts["workers"])
    except (TypeError, ValueError):
        raise ConfigError("--workers must be an integer") from None
    if opts["workers"] < 1:
        raise ConfigError("--workers must be >= 1")
    if opts["format"] not in ("csv", "records"):
        raise ConfigError(f"unknown format {opts['format']!r}")
    return opts


def _boundary_records(rows: list[dict]) -> list[ScanRecord]:
    return [ScanRecord(r["params"], r["values"], {}, r.get("error")) for r in rows]


def _cmd_ground(o: dict) -> list[ScanRecord]:
    grid = parse_grid(o["U_grid"], "U")
    return ground_scan(grid.values(), o["t"], o["workers"], o["lp_tol"])


def _cmd_thermal(o: dict) -> list[ScanRecord]:
    ug, tg = parse_grid(o["U_grid"], "U"), parse_grid(o["T_grid"], "T")
    if tg.lo < 0:
        raise ConfigError("temperatures must be nonnegative")
    if (o["U"] is not None and o["U"] < 0) or (o["T"] is not None and o["T"] < 0):
        raise ConfigError("U and T must be nonnegative")
    us = [o["U"]] if o["U"] is not None else ug.values()
    ts = [o["T"]] if o["T"] is not None else tg.values()
    records = thermal_scan(us, ts, o["t"], o["workers"], o["lp_tol"])
    if o["boundary_out"]:
        rows = []
        for u in us:
            row = {"params": {"t": o["t"], "U": float(u), "T_lo": tg.lo, "T_hi": tg.hi}}
            try:
                b = critical_temperature(float(u), tg.lo, tg.hi, o["boundary_tol"], o["t"], tolerance=o["lp_tol"])
                row["values"] = {"T_c": b.value, "bracket_lo": b.bracket[0], "bracket_hi": b.bracket[1]}
            except (NoCrossingError, ValueError, RuntimeError) as exc:
                row["values"] = {"T_c": math.nan, "bracket_lo": math.nan, "bracket_hi": math.nan}
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
        write_records(_boundary_records(rows), o["boundary_out"], o["format"])
    return records


def _cmd_quench(o: dict) -> list[ScanRecord]:
    spec = QuenchSpec(o["Ui"], o["Uf"], o["t"], o["gamma"])
    times = parse_grid(o["time_grid"], "time").values() if o["time_grid"] else time_grid(spec)
    if times[0] < 0:
        raise ConfigError("times must be nonnegative")
    return quench_run(spec, times, o["workers"], o["lp_tol"])


def _cmd_quench_scan(o: dict) -> list[ScanRecord]:
    gamma = o["gamma"] if o["gamma"] > 0 else DEFAULT_GAMMA
    ui, uf = parse_grid(o["Ui_grid"], "Ui"), parse_grid(o["Uf_grid"], "Uf")
    if ui.lo < 0 or uf.lo < 0:
        raise ConfigError("U values must be nonnegative")
    return quench_saturation_scan(ui.values(), uf.values(), gamma, o["gamma_t"], o["t"], o["workers"], o["lp_tol"])


def _cmd_mix(o: dict) -> list[ScanRecord]:
    lg = parse_grid(o["lambda_grid"], "lambda")
    if lg.lo < 0 or lg.hi > 1:
        raise ConfigError("lambda grid must lie in [0, 1]")
    if o["pair"] not in MIXING_PAIRS:
        raise ConfigError(f"pair must be one of {MIXING_PAIRS}")
    if o["U"] is None:
        o = {**o, "U": MIX_U}
    records = mixing_scan(o["pair"], o["U"], lg.values(), o["t"], o["workers"], o["lp_tol"])
    if o["boundary_out"]:
        row = {"params": {"t": o["t"], "pair": o["pair"], "U": o["U"]}}
        try:
            if o["pair"] == "plus":
                lo = critical_lambda("plus", o["U"], 0.0, 0.5, o["boundary_tol"], o["t"], tolerance=o["lp_tol"]).value
                hi = critical_lambda("plus", o["U"], 0.5, 1.0, o["boundary_tol"], o["t"], tolerance=o["lp_tol"]).value
            else:
                lo = hi = critical_lambda(o["pair"], o["U"], 0.0, 1.0, o["boundary_tol"], o["t"], tolerance=o["lp_tol"]).value
            row["values"] = {"lambda_lo": lo, "lambda_hi": hi}
        except (NoCrossingError, ValueError, RuntimeError) as exc:
            row["values"] = {"lambda_lo": math.nan, "lambda_hi": math.nan}
            row["error"] = f"{type(exc).__name__}: {exc}"
        write_records(_boundary_records([row]), o["boundary_out"], o["format"])
    return records


def _cmd_rom(o: dict) -> list[ScanRecord]:
    if not o.get("state"):
        raise ConfigError("rom needs --state <file>")
    try:
        state = load_state(o["state"])
    except (OSError, InvalidStateError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load state {o['state']}: {exc}") from None
    if state.n_qubits > MAX_QUBITS:
        raise ConfigError(f"states on more than {MAX_QUBITS} qubits are not supported")
    params = {"state": str(o["state"]), "n_qubits": state.n_qubits}
    try:
        sol = robustness_solution(state, tolerance=o["lp_tol"])
        values = {
            "R": sol.l1_norm,
            "LR": lr_from_robustness(sol.l1_norm, o["lp_tol"]),
            "M2t": mixed_sre_2(state),
            "purity": state.purity,
        }
        try:
            values["M1"] = sre(state, 1)
            values["M2"] = sre(state, 2)
        except MixedStateError:
            values["M1"] = values["M2"] = math.nan
        return [ScanRecord(params, values, {"lp_iterations": sol.iterations, "lp_gap": sol.gap, "lp_method": sol.method})]
    except Exception as exc:
        return [ScanRecord(params, {}, {}, f"{type(exc).__name__}: {exc}")]


def _cmd_catalog(o: dict) -> list[ScanRecord]:
    n = o.get("build")
    if n is None:
        raise ConfigError("catalog needs --build N")
    if not 1 <= int(n) <= MAX_QUBITS:
        raise ConfigError(f"--build must be in 1..{MAX_QUBITS}")
    cat, path = rebuild_cache(int(n))
    a = cat.a_matrix
    return [ScanRecord({"n_qubits": int(n)}, {"n_states": a.n_cols, "n_groups": len(cat.groups), "checksum": a.checksum(), "path": str(path)})]


COMMANDS = {
    "ground": _cmd_ground,
    "thermal-scan": _cmd_thermal,
    "quench": _cmd_quench,
    "quench-scan": _cmd_quench_scan,
    "mix": _cmd_mix,
    "rom": _cmd_rom,
    "catalog": _cmd_catalog,
}


def main(argv: list[str] | None = None) -> int:
    try:
        opts = resolve_options(argv)
    except ConfigError as exc:
        print(f"dimermagic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if opts.get("verbose") else logging.WARNING, format="%(name)s: %(message)s")
    logger.info("pricing backend: %s; catalog cache: %s (override with %s)", kernels.BACKEND, cache_dir(), CACHE_ENV)
    try:
        records = COMMANDS[opts["command"]](opts)
        write_records(records, opts["out"], opts["format"])
    except (ConfigError, CatalogError) as exc:
        print(f"dimermagic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:  # parameter validation (negative U, bad pair, ...)
        print(f"dimermagic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = sum(r.failed for r in records)
    if failed:
        print(f"dimermagic: {failed} of {len(records)} points failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
