"""Command-line front end.

Commands: phase-scan, spectrum, evolve, critical, verify.  A run is fully
described by its resolved configuration (a JSON document mirroring the flag
namespace; flags override file values), contains no randomness or timestamps,
and therefore produces byte-identical output when repeated.

Exit codes: 0 success, 2 invalid configuration, 3 convergence failure or
leakage flag (partial output is still written), 4 resource cap exceeded.
The worker count for grid scans can be overridden with TWOMODERABI_WORKERS.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .hilbert import DimensionLimitError, basis_state, make_space
from .models import ModelParams, ResonanceError, build_hamiltonian
from .solver import ConvergenceError
from .experiments import (
    LEAK_TOL,
    critical_coupling_estimate,
    evolve,
    phase_scan,
    spectrum_trace,
)
from .checks import run_all

WORKERS_ENV = "TWOMODERABI_WORKERS"

_COMMON_KEYS = {"model", "omega0", "omega1", "omega2", "omega", "out", "format"}
_COMMAND_KEYS = {
    "phase-scan": _COMMON_KEYS | {"g1", "g2", "tol", "n_cap"},
    "spectrum": _COMMON_KEYS | {"g", "direction", "k", "labels", "n_max", "n_max2"},
    "evolve": _COMMON_KEYS | {"g1", "g2", "tmax", "steps", "n_max", "fidelity_ref"},
    "critical": _COMMON_KEYS | {"direction", "eps", "g_max", "step", "tol"},
    "verify": {"seed"},
}


class ConfigError(ValueError):
    pass


def parse_range(text) -> list[float]:
    """Grid syntax start:stop:count with inclusive endpoints; a bare number
    is a one-point grid."""
    if isinstance(text, (int, float)):
        return [float(text)]
    parts = str(text).split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ConfigError(f"range must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError(f"range count must be >= 1, got {count}")
    return [float(v) for v in np.linspace(start, stop, count)]


def _parse_direction(text) -> tuple[float, float]:
    if isinstance(text, (list, tuple)):
        u1, u2 = text
    else:
        parts = str(text).split(",")
        if len(parts) != 2:
            raise ConfigError(f"direction must be 'u1,u2', got {text!r}")
        u1, u2 = parts
    return float(u1), float(u2)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twomoderabi",
        description="Exact diagonalization of the two-mode quantum Rabi models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, model_required=True):
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--model", choices=["h1", "h2", "rabi"])
        sp.add_argument("--omega0", type=float)
        sp.add_argument("--omega", type=float, help="sets omega1 = omega2")
        sp.add_argument("--omega1", type=float)
        sp.add_argument("--omega2", type=float)
        sp.add_argument("--out", help="output path (stdout when omitted)")
        sp.add_argument("--format", choices=["csv", "json"])

    sp = sub.add_parser("phase-scan", help="ground-state order parameters over a coupling grid")
    add_common(sp)
    sp.add_argument("--g1", help="grid start:stop:count")
    sp.add_argument("--g2", help="grid start:stop:count")
    sp.add_argument("--tol", type=float, help="truncation convergence tolerance on E0")
    sp.add_argument("--n-cap", dest="n_cap", type=int, help="largest cutoff tried per point")

    sp = sub.add_parser("spectrum", help="labeled low-lying spectrum along a coupling path")
    add_common(sp)
    sp.add_argument("--g", help="coupling magnitudes start:stop:count")
    sp.add_argument("--direction", help="coupling direction u1,u2 (normalized internally)")
    sp.add_argument("--k", type=int, help="levels per path point")
    sp.add_argument("--labels", choices=["on", "off"])
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp.add_argument("--n-max2", dest="n_max2", type=int)

    sp = sub.add_parser("evolve", help="exact time evolution from |e,0,0>")
    add_common(sp)
    sp.add_argument("--g1", type=float)
    sp.add_argument("--g2", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--n-max", dest="n_max", help="cutoff, integer or 'auto'")
    sp.add_argument("--fidelity-ref", dest="fidelity_ref", choices=["auto", "off"])

    sp = sub.add_parser("critical", help="crossover coupling estimate along a ray")
    add_common(sp)
    sp.add_argument("--direction", help="ray direction u1,u2")
    sp.add_argument("--eps", type=float, help="photon-number threshold")
    sp.add_argument("--g-max", dest="g_max", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("verify", help="run the invariant suite and print pass/fail per check")
    sp.add_argument("--config", help="JSON config file; flags override its values")
    sp.add_argument("--seed", type=int)

    return parser


_DEFAULTS = {
    "phase-scan": {"model": "h1", "omega0": 1.0, "g1": "0:1:11", "g2": "0:1:11",
                   "tol": 1e-6, "n_cap": 48, "format": "csv"},
    "spectrum": {"model": "h1", "omega0": 1.0, "g": "0:1.5:31",
                 "direction": "0.7071067811865475,0.7071067811865475", "k": 12,
                 "labels": "on", "format": "csv"},
    "evolve": {"model": "h1", "omega0": 1.0, "g1": 0.15, "g2": 0.15, "tmax": 30.0,
               "steps": 600, "n_max": "auto", "fidelity_ref": "auto", "format": "csv"},
    "critical": {"model": "h1", "omega0": 1.0, "direction": "1,0", "eps": 0.1,
                 "g_max": 1.0, "step": 0.01, "tol": 1e-6, "format": "csv"},
    "verify": {"seed": 7},
}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge config file, command-line flags, and defaults; reject unknown keys."""
    command = args.command
    known = _COMMAND_KEYS[command]
    config: dict = {}

    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        file_command = loaded.pop("command", command)
        if file_command != command:
            raise ConfigError(
                f"config file is for command {file_command!r}, invoked {command!r}"
            )
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config.update(loaded)

    for key in known:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            config[key] = value

    for key, value in _DEFAULTS[command].items():
        config.setdefault(key, value)

    # omega is shorthand for both field frequencies
    if command != "verify":
        omega = config.pop("omega", None)
        if omega is not None:
            config.setdefault("omega1", float(omega))
            config.setdefault("omega2", float(omega))
        config.setdefault("omega1", 1.0)
        config.setdefault("omega2", 1.0)
    config["command"] = command
    return config


def _params_from(config: dict, g1: float, g2: float) -> ModelParams:
    return ModelParams(
        omega0=float(config["omega0"]),
        omega1=float(config["omega1"]),
        omega2=float(config["omega2"]),
        g1=float(g1),
        g2=float(g2),
    )


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def _meta_block(command: str, config: dict, table_meta: dict) -> dict:
    meta = {"tool": "twomoderabi", "version": __version__, "command": command,
            "config": config}
    meta.update(table_meta)
    return meta


def render_csv(columns, rows, meta) -> str:
    lines = [f"# twomoderabi {__version__}"]
    for key in sorted(meta):
        if key in ("tool", "version"):
            continue
        lines.append(f"# {key}: {json.dumps(meta[key], sort_keys=True)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(columns, rows, meta) -> str:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            v = float(v)
            return None if math.isnan(v) else v
        if isinstance(v, (int, np.integer)):
            return int(v)
        return v

    doc = {
        "meta": meta,
        "columns": list(columns),
        "rows": [[cell(v) for v in row] for row in rows],
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_record(code: int, exc: Exception) -> int:
    record = {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def _sanitize_meta(meta: dict) -> dict:
    def conv(v):
        if isinstance(v, (np.floating, float)):
            return float(v)
        if isinstance(v, (np.integer, int)):
            return int(v)
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        return v

    return {k: conv(v) for k, v in meta.items()}


def _run_phase_scan(config: dict) -> tuple[int, str]:
    template = _params_from(config, 0.0, 0.0)
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    table = phase_scan(
        config["model"], template,
        parse_range(config["g1"]), parse_range(config["g2"]),
        tol=float(config["tol"]), n_cap=int(config["n_cap"]),
        workers=max(1, workers),
    )
    meta = _meta_block("phase-scan", config, _sanitize_meta(table.meta))
    status = 3 if table.meta["flagged_rows"] else 0
    return status, (render_csv if config["format"] == "csv" else render_json)(
        table.columns, table.rows, meta)


def _run_spectrum(config: dict) -> tuple[int, str]:
    template = _params_from(config, 0.0, 0.0)
    u1, u2 = _parse_direction(config["direction"])
    norm = math.hypot(u1, u2)
    if norm == 0:
        raise ConfigError("direction must be nonzero")
    u1, u2 = u1 / norm, u2 / norm
    path = [(g * u1, g * u2) for g in parse_range(config["g"])]
    model = config["model"]
    if model == "h1":
        n_max = int(config.get("n_max") or 40)
        n_max2 = int(config.get("n_max2") or 8)
    else:
        n_max = int(config.get("n_max") or 16)
        n_max2 = int(config.get("n_max2") or n_max)
    table = spectrum_trace(
        model, template, path, k=int(config["k"]),
        labeling=config["labels"] == "on", space=make_space(n_max, n_max2),
    )
    meta = _meta_block("spectrum", config, _sanitize_meta(table.meta))
    return 0, (render_csv if config["format"] == "csv" else render_json)(
        table.columns, table.rows, meta)


def _evolve_trace(kind, p, n_max, times, want_ref):
    space = make_space(n_max, n_max)
    h = build_hamiltonian(kind, p, space)
    psi0 = basis_state(space, "e", 0, 0)
    reference = None
    if want_ref and kind in ("h1", "h2") and p.resonant and math.isclose(
            p.omega0, p.omega1, rel_tol=1e-12):
        reference = kind
    return evolve(h, psi0, times, reference=reference, p=p)


def _run_evolve(config: dict) -> tuple[int, str]:
    p = _params_from(config, config["g1"], config["g2"])
    kind = config["model"]
    steps = int(config["steps"])
    tmax = float(config["tmax"])
    times = [tmax * i / steps for i in range(steps + 1)]
    want_ref = config.get("fidelity_ref") != "off"
    n_max = config["n_max"]
    if n_max == "auto":
        n = 8
        while True:
            trace = _evolve_trace(kind, p, n, times, want_ref)
            if trace.meta["leak_max"] < LEAK_TOL or n >= 40:
                break
            n += 4
    else:
        trace = _evolve_trace(kind, p, int(n_max), times, want_ref)
    meta = _meta_block("evolve", config, _sanitize_meta(trace.meta))
    status = 3 if trace.flagged else 0
    return status, (render_csv if config["format"] == "csv" else render_json)(
        trace.columns, trace.rows, meta)


def _run_critical(config: dict) -> tuple[int, str]:
    template = _params_from(config, 0.0, 0.0)
    u = _parse_direction(config["direction"])
    g_star, diag = critical_coupling_estimate(
        config["model"], template, u,
        eps=float(config["eps"]), g_max=float(config["g_max"]),
        step=float(config["step"]), tol=float(config["tol"]),
    )
    columns = ("u1", "u2", "eps", "g_star")
    rows = [(diag["direction"][0], diag["direction"][1], diag["eps"], g_star)]
    meta = _meta_block("critical", config, _sanitize_meta(
        {"bracket": diag["bracket"], "points_scanned": len(diag["scanned_g"])}))
    return 0, (render_csv if config["format"] == "csv" else render_json)(
        columns, rows, meta)


def _run_verify(config: dict) -> int:
    results = run_all(seed=int(config["seed"]))
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, passed, detail in results:
        tag = "PASS" if passed else "FAIL"
        print(f"{tag}  {name:<{width}}  {detail}")
        failed += 0 if passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except (ConfigError, ValueError) as exc:
        return _error_record(2, exc)

    try:
        if args.command == "verify":
            return _run_verify(config)
        runner = {
            "phase-scan": _run_phase_scan,
            "spectrum": _run_spectrum,
            "evolve": _run_evolve,
            "critical": _run_critical,
        }[args.command]
        status, text = runner(config)
        _emit(text, config.get("out"))
        if status != 0:
            print(json.dumps({"error": {"code": status, "type": "FlaggedRows",
                                        "message": "output contains flagged rows"}},
                             sort_keys=True), file=sys.stderr)
        return status
    except (ConfigError, ResonanceError) as exc:
        return _error_record(2, exc)
    except ValueError as exc:
        return _error_record(2, exc)
    except ConvergenceError as exc:
        return _error_record(3, exc)
    except DimensionLimitError as exc:
        return _error_record(4, exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
