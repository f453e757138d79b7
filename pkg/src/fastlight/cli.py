"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad config, bad input, usage),
2 numeric failure (wraparound, singular fit).
"""

from __future__ import annotations

import argparse
import json
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .experiments import (
    SWEEP_COLUMNS,
    row_values,
    run_detuning_sweep,
    run_trace_pair,
    search_max_advance,
    simulate_point,
)
from .fit import fit_lineshape, fit_log_law
from .io import load_trace, read_columns, write_table
from .metrics import advance_uncertainty, advancement

OUT_DIR_ENV = "FASTLIGHT_OUT_DIR"
TWO_PI_MHZ = 2 * np.pi * 1e6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _out_path(out: str) -> Path:
    p = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _metrics_dict(m) -> dict:
    return {k: float(v) for k, v in vars(m).items()}


def _delta_hz(args, cfg) -> float:
    return cfg.sweep.delta_mhz * 1e6 if args.delta is None else args.delta * 1e6


def cmd_propagate(args, cfg) -> dict:
    pt = simulate_point(cfg, _delta_hz(args, cfg))
    out = pt.seed if args.channel == "seed" else pt.conjugate
    m = pt.seed_metrics if args.channel == "seed" else pt.conjugate_metrics
    rows = zip(pt.reference.times, np.abs(pt.reference.samples), np.abs(out.samples))
    write_table(
        _out_path(args.out),
        ("time_s", "reference_amplitude", "output_amplitude"),
        rows,
        {"channel": args.channel, "delta_hz": pt.delta},
    )
    return {"channel": args.channel, "delta_hz": pt.delta, **_metrics_dict(m)}


def cmd_sweep(args, cfg) -> dict:
    rows = run_detuning_sweep(cfg)
    geom = cfg.geometry_model
    separation = geom.seed_offset - geom.conjugate_offset
    meta = {
        "pump_hz": geom.pump_frequency,
        "seed_offset_hz": geom.seed_offset,
        "conjugate_offset_hz": geom.conjugate_offset,
        "seed_conjugate_separation_hz": separation,
    }
    write_table(_out_path(args.out), SWEEP_COLUMNS, (row_values(r) for r in rows), meta)
    ok = [r for r in rows if r.ok and r.conjugate_measurable]
    best = max(ok, key=lambda r: r.conjugate_advance) if ok else None
    return {
        "rows": len(rows),
        "failed_rows": sum(not r.ok for r in rows),
        "seed_conjugate_separation_hz": separation,
        "max_conjugate_advance_s": best.conjugate_advance if best else None,
        "max_conjugate_advance_delta_hz": best.delta if best else None,
    }


def cmd_traces(args, cfg) -> dict:
    delta = _delta_hz(args, cfg)
    tt = run_trace_pair(cfg, delta)
    meta = {f"scale_{k}": v for k, v in tt.scale.items()}
    meta["delta_hz"] = delta
    write_table(
        _out_path(args.out),
        ("time_s", "reference", "seed", "conjugate"),
        zip(tt.times, tt.reference, tt.seed, tt.conjugate),
        meta,
    )
    pt = tt.point
    return {
        "delta_hz": delta,
        "scale": tt.scale,
        "seed": _metrics_dict(pt.seed_metrics),
        "conjugate": _metrics_dict(pt.conjugate_metrics),
        "conjugate_lead_s": pt.conjugate_lead,
    }


def cmd_fit_lineshape(args, cfg) -> dict:
    data = read_columns(args.input, 2)
    samples = np.column_stack([data[:, 0] * 2 * np.pi, data[:, 1]])
    initial = cfg.seed_channel if args.channel == "seed" else cfg.conjugate_channel
    res = fit_lineshape(samples, initial, max_iterations=args.max_iterations)
    rows = []
    for j, ln in enumerate(res.channel.lines):
        sig = res.parameter_sigmas
        rows.append((j, -ln.strength, sig[f"strength_{j}"], ln.hwhm / TWO_PI_MHZ,
                     sig[f"hwhm_{j}"] / TWO_PI_MHZ, ln.center_detuning / TWO_PI_MHZ,
                     sig[f"center_{j}"] / TWO_PI_MHZ))
    meta = {"converged": res.converged, "iterations": res.iterations,
            "residual_rms": res.residual_rms, "flags": ";".join(res.flags)}
    write_table(
        _out_path(args.out),
        ("line", "alpha_per_m", "alpha_sigma", "gamma_mhz", "gamma_sigma", "center_mhz", "center_sigma"),
        rows,
        meta,
    )
    if not res.converged:
        raise RuntimeError(f"fit did not converge in {res.iterations} iterations")
    return {**meta, "lines": len(rows)}


def cmd_fit_power(args, cfg) -> dict:
    fit = fit_log_law(read_columns(args.input, 2))
    row = (fit.offset, fit.slope, fit.reference_power, fit.residual_rms)
    write_table(_out_path(args.out), ("offset_s", "slope_s", "reference_power", "residual_rms_s"), [row])
    return dict(zip(("offset_s", "slope_s", "reference_power", "residual_rms_s"), row))


def cmd_analyze(args, cfg) -> dict:
    ref = load_trace(args.reference)
    out = load_trace(args.trace)
    m = advancement(out, ref, cfg.medium.length_m)
    sigma = advance_uncertainty(out, ref, n_boot=args.bootstrap, seed=args.seed)
    d = _metrics_dict(m)
    d["peak_advance_sigma"] = sigma
    cols = tuple(d)
    write_table(_out_path(args.out), cols, [tuple(d[c] for c in cols)])
    return d


def cmd_search_max(args, cfg) -> dict:
    cap = cfg.thresholds.distortion_cap if args.cap is None else args.cap
    delta, adv = search_max_advance(cfg, cap)
    write_table(_out_path(args.out), ("distortion_cap", "delta_hz", "conjugate_advance_s"), [(cap, delta, adv)])
    return {"distortion_cap": cap, "delta_hz": delta, "conjugate_advance_s": adv}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fastlight", description="Fast-light pulse propagation in 4WM media.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", default="default", help="config YAML or 'default'")
        p.add_argument("--out", required=True, help="output CSV path")
        p.set_defaults(func=func)
        return p

    p = add("propagate", cmd_propagate, "one output/reference trace pair")
    p.add_argument("--delta", type=float, help="two-photon detuning in MHz")
    p.add_argument("--channel", choices=("seed", "conjugate"), default="seed")
    add("sweep", cmd_sweep, "advancement versus two-photon detuning")
    p = add("traces", cmd_traces, "reference, seed and conjugate traces")
    p.add_argument("--delta", type=float, help="two-photon detuning in MHz")
    p = add("fit-lineshape", cmd_fit_lineshape, "fit lines to a (detuning_hz, gain) file")
    p.add_argument("--input", required=True)
    p.add_argument("--channel", choices=("seed", "conjugate"), default="conjugate")
    p.add_argument("--max-iterations", type=int, default=200)
    p = add("fit-power", cmd_fit_power, "log-law fit of a (power, advancement_s) file")
    p.add_argument("--input", required=True)
    p = add("analyze", cmd_analyze, "metrics from measured trace files")
    p.add_argument("--reference", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p = add("search-max", cmd_search_max, "largest conjugate advancement under a distortion cap")
    p.add_argument("--cap", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = load_config(args.config)
        _emit(args.func(args, cfg))
    except np.linalg.LinAlgError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    return 0
