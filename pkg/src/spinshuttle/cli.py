"""Batch front-end: protocol design, simulation, oracle comparison, sweeps.

Four subcommands, all driven by a flat ``key = value`` config file::

    spinshuttle design   --config run.cfg [--out DIR]
    spinshuttle simulate --config run.cfg [--out DIR] [--dt V] [--grid-points N]
    spinshuttle compare  --config run.cfg [--out DIR] [--dt V] [--grid-points N]
    spinshuttle sweep    --config run.cfg [--out DIR] [--sequential]

Config syntax: one ``key = value`` per line, ``#`` starts a comment, lists
are comma-separated (brackets optional).  Unknown keys are rejected.  Keys
and defaults:

    mode            optional; must match the subcommand when present
    protocol        "sta" | "adiabatic"          (default "sta")
    d               transport distance           (default 10.0)
    t_f             protocol duration            (default 8.0)
    alpha0          adiabatic coupling strength  (default 1.0)
    m, omega, hbar  unit scales                  (default 1.0 each)
    x_min, x_max    domain                       (default -15.0, 25.0)
    n_points        grid size, power of two      (default 2048)
    dt              time step                    (default 1e-3)
    gN              mean-field coupling          (default 0.0)
    sample_every    observable cadence in steps  (default 10)
    out_dir         output directory             (default ".")
    gn_values       sweep couplings, list        (sweep only)
    snapshot_times  extra density snapshots      (simulate; default none)
    design_samples  rows in controls.csv         (default 1001)
    compare_points  oracle comparison instants   (default 10)
    phase_samples   quadrature base resolution   (default 4001)
    sequential      disable sweep parallelism    (default false)

The output directory may also be set through the environment variable
``SPINSHUTTLE_OUT`` (the ``--out`` flag wins).  Exit status: 0 when every
requested run completed and no error-level validation flag fired; warnings
(adiabaticity bound, residual-excitation timing) are recorded in
``summary.json`` but do not fail the run.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .core import PhysicalScales, build_grid, initial_state
from .csvio import write_columns
from .dynamics import exact_state, integrate_auxiliary
from .observables import ObservableRecorder, density_profiles, fidelity, make_target
from .propagator import EvolutionConfig, evolve
from .protocols import (AdiabaticProtocol, QuadratureError, SingularDesignError,
                        StaProtocol, adiabatic_design_report, phase_sigma,
                        sample_controls, sta_design_report)

__all__ = ["main", "parse_config"]

_DEFAULTS = {
    "mode": None,
    "protocol": "sta",
    "d": 10.0,
    "t_f": 8.0,
    "alpha0": 1.0,
    "m": 1.0,
    "omega": 1.0,
    "hbar": 1.0,
    "x_min": -15.0,
    "x_max": 25.0,
    "n_points": 2048,
    "dt": 1e-3,
    "gN": 0.0,
    "sample_every": 10,
    "out_dir": ".",
    "gn_values": None,
    "snapshot_times": (),
    "design_samples": 1001,
    "compare_points": 10,
    "phase_samples": 4001,
    "sequential": False,
}
_INT_KEYS = {"n_points", "sample_every", "design_samples", "compare_points",
             "phase_samples"}
_LIST_KEYS = {"gn_values", "snapshot_times"}
_STR_KEYS = {"mode", "protocol", "out_dir"}
_BOOL_KEYS = {"sequential"}


class ConfigError(ValueError):
    pass


def _parse_scalar(text: str):
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config(text: str) -> dict:
    """Parse the flat key=value format; unknown keys are an error."""
    cfg = dict(_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in _LIST_KEYS:
            value = value.strip("[]")
            items = [v.strip() for v in value.split(",") if v.strip()]
            try:
                cfg[key] = [float(v) for v in items]
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be a list of numbers")
        else:
            parsed = _parse_scalar(value)
            if key in _STR_KEYS:
                if not isinstance(parsed, str):
                    raise ConfigError(f"line {lineno}: {key} must be a string")
            elif key in _BOOL_KEYS:
                if not isinstance(parsed, bool):
                    raise ConfigError(f"line {lineno}: {key} must be true/false")
            elif key in _INT_KEYS:
                if not isinstance(parsed, int) or isinstance(parsed, bool):
                    raise ConfigError(f"line {lineno}: {key} must be an integer")
            else:
                if isinstance(parsed, bool) or not isinstance(parsed, (int, float)):
                    raise ConfigError(f"line {lineno}: {key} must be a number")
                parsed = float(parsed)
            cfg[key] = parsed
    return cfg


def _scales(cfg) -> PhysicalScales:
    return PhysicalScales(m=cfg["m"], omega=cfg["omega"], hbar=cfg["hbar"])


def _protocol(cfg):
    kind = cfg["protocol"]
    if kind == "sta":
        return StaProtocol(d=cfg["d"], t_f=cfg["t_f"], scales=_scales(cfg))
    if kind == "adiabatic":
        return AdiabaticProtocol(alpha0=cfg["alpha0"], d=cfg["d"], t_f=cfg["t_f"],
                                 scales=_scales(cfg))
    raise ConfigError(f"protocol must be 'sta' or 'adiabatic', got {kind!r}")


def protocol_from_config(text: str):
    """Build the protocol described by a config string."""
    return _protocol(parse_config(text))


def protocol_to_config(protocol) -> str:
    """Config fragment that reproduces a protocol under ``parse_config``."""
    sc = protocol.scales
    lines = []
    if isinstance(protocol, StaProtocol):
        lines.append("protocol = sta")
    elif isinstance(protocol, AdiabaticProtocol):
        lines.append("protocol = adiabatic")
        lines.append(f"alpha0 = {protocol.alpha0!r}")
    else:
        raise TypeError(f"unknown protocol type {type(protocol)!r}")
    lines += [f"d = {protocol.d!r}", f"t_f = {protocol.t_f!r}",
              f"m = {sc.m!r}", f"omega = {sc.omega!r}", f"hbar = {sc.hbar!r}"]
    return "\n".join(lines) + "\n"


def _report(cfg):
    if cfg["protocol"] == "sta":
        return sta_design_report(cfg["d"], cfg["t_f"], _scales(cfg))
    return adiabatic_design_report(cfg["alpha0"], cfg["d"], cfg["t_f"], _scales(cfg))


def _phase_with_escalation(protocol, n_samples: int) -> float:
    for n in (n_samples, 16 * n_samples, 256 * n_samples):
        try:
            return phase_sigma(protocol, n_samples=n)
        except QuadratureError:
            continue
    return phase_sigma(protocol, n_samples=4096 * n_samples)


def _write_summary(out_dir: str, payload: dict):
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _first_flip_time(times: np.ndarray, sx: np.ndarray,
                     threshold: float = -0.95):
    """Time of the first local minimum of <sigma_x> at or below threshold."""
    for i in range(1, len(sx) - 1):
        if sx[i] <= threshold and sx[i] < sx[i - 1] and sx[i] <= sx[i + 1]:
            return float(times[i])
    return None


def cmd_design(cfg) -> int:
    out = cfg["out_dir"]
    report = _report(cfg)
    if not report.ok:
        summary = {"config": _public(cfg), "validation": report.as_dict()}
        _write_summary(out, summary)
        print(f"design rejected: {', '.join(report.errors)} "
              f"(singularity margin {report.details.get('singularity_margin', 0):.2e}, "
              f"singular t_f = {report.details.get('singular_t_f', float('nan')):.6f})",
              file=sys.stderr)
        return 2
    protocol = _protocol(cfg)
    trace = sample_controls(protocol, cfg["design_samples"])
    trace.write_csv(os.path.join(out, "controls.csv"))
    phase = _phase_with_escalation(protocol, cfg["phase_samples"])
    summary = {
        "config": _public(cfg),
        "phase_sigma": phase,
        "validation": report.as_dict(),
    }
    _write_summary(out, summary)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _run_simulation(cfg, observer=None, extra_steps=()):
    scales = _scales(cfg)
    grid = build_grid(cfg["x_min"], cfg["x_max"], cfg["n_points"], cfg["dt"],
                      cfg["t_f"])
    protocol = _protocol(cfg)
    evo = EvolutionConfig(gN=cfg["gN"], sample_every=cfg["sample_every"],
                          scales=scales)
    start = initial_state(grid, scales)
    final = evolve(start, protocol, evo, observer=observer,
                   extra_sample_steps=extra_steps)
    return grid, protocol, final


def cmd_simulate(cfg) -> int:
    out = cfg["out_dir"]
    report = _report(cfg)
    if not report.ok:
        print(f"simulation rejected: {', '.join(report.errors)}", file=sys.stderr)
        return 2
    scales = _scales(cfg)
    t_f = cfg["t_f"]
    n_steps = round(t_f / cfg["dt"])
    snap_steps = sorted({round(j * n_steps / 4) for j in range(5)}
                        | {round(t / cfg["dt"]) for t in cfg["snapshot_times"]})
    if any(s < 0 or s > n_steps for s in snap_steps):
        print("snapshot_times must lie within [0, t_f]", file=sys.stderr)
        return 2

    snapshots = {}

    def snap_observer(t, field):
        step_index = round(t / cfg["dt"])
        if step_index in snap_steps and step_index not in snapshots:
            snapshots[step_index] = (t, density_profiles(field))

    protocol_for_recorder = _protocol(cfg)
    recorder = ObservableRecorder(protocol_for_recorder, scales)

    def observer(t, field):
        recorder(t, field)
        snap_observer(t, field)

    grid, protocol, final = _run_simulation(cfg, observer, snap_steps)
    recorder.write_csv(os.path.join(out, "observables.csv"))
    for j, step_index in enumerate(snap_steps):
        t, (total, up, down) = snapshots[step_index]
        write_columns(os.path.join(out, f"density_t{j}.csv"),
                      ["t", "x", "total", "up", "down"],
                      [np.full(grid.n_points, t), grid.x, total, up, down])

    target = make_target(cfg["d"], -1, grid, scales)
    last = recorder.records[-1]
    times = recorder.column("t")
    summary = {
        "config": _public(cfg),
        "validation": report.as_dict(),
        "fidelity": fidelity(final, target),
        "final": {"t": last.t, "com": last.com, "sx": last.sx, "sy": last.sy,
                  "sz": last.sz, "P": last.bloch, "vel": last.vel,
                  "norm": last.norm},
        "norm_drift": float(np.max(np.abs(recorder.column("norm") - 1.0))),
        "snapshot_times": [snapshots[s][0] for s in snap_steps],
    }
    if cfg["protocol"] == "adiabatic":
        summary["first_flip_time"] = _first_flip_time(times, recorder.column("sx"))
        if "t_sp" in report.details:
            summary["predicted_flip_time"] = report.details["t_sp"]
    _write_summary(out, summary)
    return 0


def cmd_compare(cfg) -> int:
    out = cfg["out_dir"]
    if cfg["gN"] != 0.0:
        print("compare: oracle undefined for interacting runs (gN != 0)",
              file=sys.stderr)
        return 2
    report = _report(cfg)
    if not report.ok:
        print(f"compare rejected: {', '.join(report.errors)}", file=sys.stderr)
        return 2
    scales = _scales(cfg)

    def infidelity_rows(dt):
        n_steps = round(cfg["t_f"] / dt)
        points = max(1, min(cfg["compare_points"], n_steps))
        steps = sorted({round(j * n_steps / points) for j in range(1, points + 1)})
        grid = build_grid(cfg["x_min"], cfg["x_max"], cfg["n_points"], dt, cfg["t_f"])
        protocol = _protocol(cfg)
        # integrate the oracle on the grid's exact time axis, refined so the
        # trajectory error stays negligible even for a coarse propagator dt
        clamped = (lambda t: protocol.x0(min(t, protocol.t_f)),
                   lambda t: protocol.alpha(min(t, protocol.t_f)))
        refine = max(1, math.ceil(dt / 1e-3))
        trace = integrate_auxiliary(clamped, grid.t_final, n_steps * refine + 1,
                                    scales)
        chi = (2 ** -0.5, 2 ** -0.5)
        rows = []

        def observer(t, field):
            step_index = round(t / dt)
            if step_index in steps:
                oracle = exact_state(trace, grid.dt * step_index, 0, chi, grid)
                rows.append((t, 1.0 - fidelity(field, oracle)))

        evolve(initial_state(grid, scales), protocol,
               EvolutionConfig(gN=0.0, sample_every=1, scales=scales), observer)
        return rows

    rows = infidelity_rows(cfg["dt"])
    write_columns(os.path.join(out, "infidelity.csv"), ["t", "infidelity"],
                  [np.array([r[0] for r in rows]), np.array([r[1] for r in rows])])
    worst = max(r[1] for r in rows)
    rows_half = infidelity_rows(cfg["dt"] / 2.0)
    worst_half = max(r[1] for r in rows_half)
    floor = 1e-14
    if worst > floor and worst_half > floor:
        order = 0.5 * math.log2(worst / worst_half)
        note = ""
    else:
        order = None
        note = ("splitting error below the roundoff floor at this dt; "
                "rerun with a coarser dt to measure the convergence order")
    summary = {
        "config": _public(cfg),
        "max_infidelity": worst,
        "max_infidelity_half_dt": worst_half,
        "measured_order": order,
        "note": note,
    }
    _write_summary(out, summary)
    return 0


def _sweep_worker(args):
    index, gn, cfg = args
    try:
        local = dict(cfg, gN=gn)
        grid, protocol, final = _run_simulation(local)
        target = make_target(cfg["d"], -1, grid, _scales(cfg))
        return index, fidelity(final, target), None
    except Exception as exc:  # failed rows are reported, not fatal
        return index, float("nan"), f"{type(exc).__name__}: {exc}"


def cmd_sweep(cfg) -> int:
    out = cfg["out_dir"]
    values = cfg["gn_values"]
    if not values:
        print("sweep requires a non-empty gn_values list", file=sys.stderr)
        return 2
    if cfg["protocol"] != "sta":
        print("sweep is defined for the sta protocol", file=sys.stderr)
        return 2
    report = _report(cfg)
    if not report.ok:
        print(f"sweep rejected: {', '.join(report.errors)}", file=sys.stderr)
        return 2
    jobs = [(i, gn, cfg) for i, gn in enumerate(values)]
    results = [None] * len(values)
    if cfg["sequential"] or len(values) == 1:
        for job in jobs:
            i, fid, err = _sweep_worker(job)
            results[i] = (fid, err)
    else:
        workers = min(len(values), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, fid, err in pool.map(_sweep_worker, jobs):
                results[i] = (fid, err)
    write_columns(os.path.join(out, "sweep.csv"), ["gN", "fidelity"],
                  [np.array(values), np.array([r[0] for r in results])])
    failures = {values[i]: r[1] for i, r in enumerate(results) if r[1]}
    summary = {
        "config": _public(cfg),
        "gn_values": list(values),
        "fidelities": [r[0] for r in results],
        "failures": failures,
    }
    _write_summary(out, summary)
    if failures:
        for gn, err in failures.items():
            print(f"sweep run gN={gn} failed: {err}", file=sys.stderr)
        return 1
    return 0


def _public(cfg) -> dict:
    return {k: v for k, v in cfg.items() if v is not None and k != "mode"}


_COMMANDS = {
    "design": cmd_design,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinshuttle",
        description="Transport and spin-flip control for trapped spinor condensates")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="flat key=value config file")
        p.add_argument("--out", help="output directory (overrides config/env)")
        p.add_argument("--dt", type=float, help="override the time step")
        p.add_argument("--grid-points", type=int, help="override n_points")
        p.add_argument("--sequential", action="store_true",
                       help="run sweep members sequentially")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if cfg["mode"] is not None and cfg["mode"] != args.command:
        print(f"config declares mode={cfg['mode']!r} but the "
              f"{args.command!r} subcommand was invoked", file=sys.stderr)
        return 2
    if args.dt is not None:
        cfg["dt"] = args.dt
    if args.grid_points is not None:
        cfg["n_points"] = args.grid_points
    if args.sequential:
        cfg["sequential"] = True
    env_out = os.environ.get("SPINSHUTTLE_OUT")
    if env_out:
        cfg["out_dir"] = env_out
    if args.out:
        cfg["out_dir"] = args.out
    os.makedirs(cfg["out_dir"], exist_ok=True)

    try:
        return _COMMANDS[args.command](cfg)
    except (ConfigError, SingularDesignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
