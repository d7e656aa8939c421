"""
Command-line front end.

Subcommands ``run``, ``sweep-lapse``, ``sweep-order`` and ``validate``. Options
may come from a JSON config file (``--config``); explicit flags override it.

Exit codes: 0 ok, 1 failed validation, 2 bad configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .analysis import (
    ALPHA_GRID,
    UNITARY,
    SweepResult,
    default_jobs,
    efficiency_series,
    resolve_lapse,
    sweep_lapse,
    sweep_order,
)
from .correlations import CorrelationKind, odd_window, smooth
from .engine import IMAConfig, RunTrace, run_ima_deterministic, run_ima_monte_carlo
from .grid import GridGeometry
from .operators import tulsi_delta

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

TRACE_SCHEMA = "qwalk-trace/1"
SWEEP_SCHEMA = "qwalk-sweep/1"
MC_SCHEMA = "qwalk-montecarlo/1"
VALIDATE_SCHEMA = "qwalk-validate/1"

DEFAULTS: dict[str, Any] = {
    "n": 10,
    "delta": "pi/4",
    "target": [0, 0],
    "lapse": None,
    "lapses": None,
    "unitary": False,
    "k_max": None,
    "success_target": 0.5,
    "mode": "deterministic",
    "trials": 10_000,
    "seed": 0,
    "correlations": [],
    "smoothing_window": None,
    "output": None,
    "format": "csv",
    "jobs": None,
    "m": [1, 2, 4, 8, 16],
    "exponents": [8, 10, 12, 14],
    "lapse_rules": ["1", UNITARY, "sqrtN", "sqrtN/2", "sqrtN/4", "sqrtN/8"],
}


class ConfigError(ValueError):
    pass


def parse_delta(value: Any, n_positions: int | None) -> float | str:
    """Radians, ``"pi/<k>"``, or ``"tulsi"`` (resolved when ``n_positions`` is known)."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    if text == "tulsi":
        return tulsi_delta(n_positions) if n_positions else "tulsi"
    if text.startswith("pi"):
        rest = text[2:]
        try:
            return math.pi / float(rest[1:]) if rest.startswith("/") else math.pi * float(rest or 1)
        except ValueError:
            pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse delta {value!r}") from None


def _csv_list(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items() if not k.startswith("_")}
    unknown = set(data) - set(DEFAULTS) - {"command"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merge(args: argparse.Namespace) -> dict[str, Any]:
    cfg = dict(DEFAULTS)
    loaded = _load_config(args.config)
    intended = loaded.pop("command", args.command)
    if intended != args.command:
        raise ConfigError(f"config is for '{intended}', not '{args.command}'")
    cfg.update(loaded)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    return cfg


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else repr(float(value))
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _emit(schema: str, columns: list[str], rows: list[list[Any]], fmt: str, meta: dict, output: str | None) -> None:
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(f"# schema={schema}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    else:
        doc = {
            "schema": schema,
            "meta": meta,
            "columns": columns,
            "rows": [{c: _jsonable(v) for c, v in zip(columns, row)} for row in rows],
        }
        buf.write(json.dumps(doc, indent=1, allow_nan=False))
        buf.write("\n")
    text = buf.getvalue()
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- run ---------------------------------------------------------------------------


def trace_table(trace: RunTrace, p: float, window: int | None) -> tuple[list[str], list[list[Any]]]:
    """Columns and rows of a trace file."""
    kinds = list(trace.correlations)
    columns = ["k", "P_t", "P0", "P1", "survival", "P_c", "e"] + kinds
    series = [
        trace.k,
        trace.p_target,
        trace.p0,
        trace.p_control_one,
        trace.survival,
        trace.p_cumulative,
        efficiency_series(trace, p),
    ] + [trace.correlations[k] for k in kinds]
    if window and window > 1:
        w = odd_window(window)
        for name in ["P_t", "P_c", "e"] + kinds:
            columns.append(f"{name}_smooth")
            series.append(smooth(series[columns.index(name)], w))
    rows = [list(r) for r in zip(*[s.tolist() for s in series])]
    for row in rows:
        row[0] = int(row[0])
    return columns, rows


def _run_lapses(cfg: dict[str, Any], n_positions: int) -> list[int | None]:
    if cfg["unitary"]:
        return [None]
    rules = cfg["lapses"] if cfg["lapses"] is not None else [cfg["lapse"]]
    try:
        return [resolve_lapse(r, n_positions) for r in rules]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_run(cfg: dict[str, Any]) -> int:
    geom = _geometry(cfg["n"])
    delta = parse_delta(cfg["delta"], geom.n_positions)
    kinds = _kinds(cfg)
    lapses = _run_lapses(cfg, geom.n_positions)
    output = cfg["output"]
    if len(lapses) > 1 and (output is None or "{lapse}" not in output):
        raise ConfigError("several lapses need an output path containing '{lapse}'")
    fmt = _format(cfg)
    for lapse in lapses:
        try:
            config = IMAConfig(
                geom,
                delta=delta,
                target=tuple(cfg["target"]),
                lapse=lapse,
                k_max=cfg["k_max"],
                success_target=float(cfg["success_target"]),
                mode=cfg["mode"],
                trials=int(cfg["trials"]),
                seed=int(cfg["seed"]),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        label = UNITARY if lapse is None else str(lapse)
        meta = {
            "version": __version__,
            "n_qubits": geom.n_qubits,
            "N": geom.n_positions,
            "delta": delta,
            "target": list(config.target),
            "lapse": label,
            "k_max": config.steps,
            "success_target": config.success_target,
            "mode": config.mode,
        }
        path = None if output is None else output.replace("{lapse}", label)
        if config.mode == "monte_carlo":
            freq, err = run_ima_monte_carlo(config)
            pc = run_ima_deterministic(config).final_cumulative
            columns = ["N", "lapse", "k_max", "trials", "seed", "success_frequency", "stderr", "P_c_deterministic"]
            rows = [[geom.n_positions, label, config.steps, config.trials, config.seed, freq, err, pc]]
            meta.update(trials=config.trials, seed=config.seed)
            _emit(MC_SCHEMA, columns, rows, fmt, meta, path)
            continue
        trace = run_ima_deterministic(config, correlations=kinds)
        window = cfg["smoothing_window"]
        if window is None and kinds:
            window = lapse or 1
        columns, rows = trace_table(trace, config.success_target, window)
        meta["smoothing_window"] = odd_window(window) if window else 1
        _emit(TRACE_SCHEMA, columns, rows, fmt, meta, path)
    return EXIT_OK


# -- sweeps ------------------------------------------------------------------------

SWEEP_COLUMNS = [
    "rule",
    "N",
    "log2N",
    "lapse",
    "m_sqrtN_over_l",
    "m_log2",
    "k_max",
    "P_c_final",
    "TS",
    "TS_over_N",
    "optimal_k",
    "TS_at_optimal",
] + [f"f_{a}" for a in ALPHA_GRID]


def sweep_table(sweeps: Sequence[tuple[str, SweepResult]]) -> tuple[list[str], list[list[Any]]]:
    extra_keys = sorted({k for _, s in sweeps for r in s.rows for k in r.extras})
    columns = SWEEP_COLUMNS + extra_keys
    rows = []
    for rule, sweep in sweeps:
        for r in sweep.rows:
            n = r.n_positions
            m = r.m
            fit = [r.ts / (math.sqrt(n) * math.log2(n) ** a) for a in ALPHA_GRID]
            rows.append(
                [rule, n, r.log2_n, r.lapse, m, None if m is None else math.log2(m), r.k_max_used,
                 r.p_c_final, r.ts, r.ts / n, r.optimal_k, r.ts_at_optimal]
                + fit
                + [r.extras.get(k) for k in extra_keys]
            )
    return columns, rows


def cmd_sweep_lapse(cfg: dict[str, Any]) -> int:
    geom = _geometry(cfg["n"])
    delta = parse_delta(cfg["delta"], geom.n_positions)
    if cfg["lapses"] is not None:
        rules = _as_list(cfg["lapses"])
    else:
        ms = _as_list(cfg["m"])
        if not ms:
            raise ConfigError("empty m list")
        rules = [f"sqrtN/{float(m):g}" for m in ms]
    kinds = _kinds(cfg)
    try:
        result = sweep_lapse(
            geom, delta, rules, float(cfg["success_target"]), jobs=_jobs(cfg), correlations=kinds
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    columns, rows = sweep_table([("lapse-sweep", result)])
    meta = {"version": __version__, "N": geom.n_positions, "delta": delta, "success_target": cfg["success_target"]}
    _emit(SWEEP_SCHEMA, columns, rows, _format(cfg), meta, cfg["output"])
    return EXIT_OK


def cmd_sweep_order(cfg: dict[str, Any]) -> int:
    exponents = [int(e) for e in _as_list(cfg["exponents"])]
    if not exponents:
        raise ConfigError("empty exponent list")
    if any(e < 2 or e % 2 for e in exponents):
        raise ConfigError(f"exponents must be even and >= 2: {exponents}")
    delta = parse_delta(cfg["delta"], None)
    rules = [str(r) for r in _as_list(cfg["lapse_rules"])]
    if not rules:
        raise ConfigError("empty lapse rule list")
    sweeps = []
    try:
        for rule in rules:
            sweeps.append((rule, sweep_order(exponents, delta, rule, float(cfg["success_target"]), jobs=_jobs(cfg))))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    columns, rows = sweep_table(sweeps)
    meta = {"version": __version__, "exponents": exponents, "delta": delta, "success_target": cfg["success_target"]}
    _emit(SWEEP_SCHEMA, columns, rows, _format(cfg), meta, cfg["output"])
    return EXIT_OK


# -- validate ----------------------------------------------------------------------


def cmd_validate(cfg: dict[str, Any]) -> int:
    from .validate import run_checks

    results = run_checks()
    if cfg["output"] is None and cfg["format"] == "csv":
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.name:<20s} max_dev={r.max_deviation:.3e}  tol={r.tolerance:.1e}  {r.detail}")
    else:
        columns = ["check", "passed", "max_deviation", "tolerance", "detail"]
        rows = [[r.name, r.passed, r.max_deviation, r.tolerance, r.detail] for r in results]
        _emit(VALIDATE_SCHEMA, columns, rows, _format(cfg), {"version": __version__}, cfg["output"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# -- helpers -----------------------------------------------------------------------


def _as_list(value: Any) -> list:
    if value is None:
        return []
    if isinstance(value, str):
        return _csv_list(value)
    return list(value)


def _kinds(cfg: dict[str, Any]) -> list[str]:
    try:
        return [CorrelationKind(k).value for k in _as_list(cfg["correlations"])]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _geometry(n: Any) -> GridGeometry:
    try:
        return GridGeometry(int(n))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _format(cfg: dict[str, Any]) -> str:
    fmt = cfg["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    return fmt


def _jobs(cfg: dict[str, Any]) -> int:
    return default_jobs() if cfg["jobs"] is None else max(int(cfg["jobs"]), 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--output", "-o", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--delta", help="radians, pi/<k>, or 'tulsi' (default pi/4)")
        p.add_argument("--p", dest="success_target", type=float, help="target overall success probability")

    run = sub.add_parser("run", help="evolve one configuration and write its per-step trace")
    common(run)
    run.add_argument("--n", type=int, help="position qubits (even)")
    run.add_argument("--lapse", help="steps between control measurements: integer or sqrtN/<m>")
    run.add_argument("--lapses", type=_csv_list, help="comma-separated lapses; output must contain {lapse}")
    run.add_argument("--unitary", action="store_const", const=True, help="no intermediate measurements")
    run.add_argument("--k-max", dest="k_max", type=int)
    run.add_argument("--target", type=int, nargs=2, metavar=("X", "Y"))
    run.add_argument("--correlations", type=_csv_list, help=f"kinds: {', '.join(k.value for k in CorrelationKind)}")
    run.add_argument("--smoothing-window", dest="smoothing_window", type=int)
    run.add_argument("--mode", choices=("deterministic", "monte_carlo"))
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)

    sl = sub.add_parser("sweep-lapse", help="total steps versus lapse at fixed N")
    common(sl)
    sl.add_argument("--n", type=int)
    sl.add_argument("--m", type=_csv_list, help="lapse divisors, l = sqrtN/m (default 1,2,4,8,16)")
    sl.add_argument("--lapses", type=_csv_list, help="explicit lapse rules instead of --m")
    sl.add_argument("--correlations", type=_csv_list)
    sl.add_argument("--jobs", type=int, help="worker processes (env QWALK_JOBS)")

    so = sub.add_parser("sweep-order", help="total steps versus N for lapse rules")
    common(so)
    so.add_argument("--exponents", type=_csv_list, help="even log2 N values, e.g. 8,10,12,14")
    so.add_argument("--lapse-rules", dest="lapse_rules", type=_csv_list)
    so.add_argument("--jobs", type=int)

    val = sub.add_parser("validate", help="check the simulator against dense references")
    val.add_argument("--config")
    val.add_argument("--output", "-o")
    val.add_argument("--format", choices=("csv", "json"))
    return parser


COMMANDS = {
    "run": cmd_run,
    "sweep-lapse": cmd_sweep_lapse,
    "sweep-order": cmd_sweep_order,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"qwalk: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qwalk: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
