"""Regenerate the sweep, trace and search outputs from the default config.

Writes CSV tables (and PNG plots when matplotlib is available) to the
output directory, default ``results/``.

Run:  python scripts/reproduce_figures.py [--out results] [--config default]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from fastlight.config import load_config
from fastlight.experiments import SWEEP_COLUMNS, row_values, run_detuning_sweep, run_trace_pair, search_max_advance
from fastlight.io import write_table


def plot_sweep(rows, path):
    import matplotlib.pyplot as plt

    d = np.array([r.delta for r in rows]) / 1e6
    seed = np.array([r.seed_advance for r in rows]) * 1e9
    conj = np.array([r.conjugate_advance if r.conjugate_measurable else np.nan for r in rows]) * 1e9
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(d, seed, "o-", ms=3, label="seed")
    ax.plot(d, conj, "s-", ms=3, label="conjugate (measurable)")
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("two-photon detuning (MHz)")
    ax.set_ylabel("peak advancement (ns)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_traces(tt, path):
    import matplotlib.pyplot as plt

    t = (tt.times - tt.times[np.argmax(tt.reference)]) * 1e9
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name in ("reference", "seed", "conjugate"):
        ax.plot(t, getattr(tt, name), label=f"{name} (x{1 / tt.scale[name]:.2g})")
    ax.set_xlim(-600, 600)
    ax.set_xlabel("time from reference peak (ns)")
    ax.set_ylabel("normalized power")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--config", default="default")
    args = ap.parse_args()
    out = Path(args.out)
    cfg = load_config(args.config)

    rows = run_detuning_sweep(cfg)
    write_table(out / "sweep.csv", SWEEP_COLUMNS, (row_values(r) for r in rows))
    traces = {d: run_trace_pair(cfg, d * 1e6) for d in (17.0, 23.0, -21.0)}
    for d, tt in traces.items():
        write_table(
            out / f"traces_{d:+.0f}MHz.csv",
            ("time_s", "reference", "seed", "conjugate"),
            zip(tt.times, tt.reference, tt.seed, tt.conjugate),
            {f"scale_{k}": v for k, v in tt.scale.items()},
        )
    caps = (0.001, 0.002, 0.005, 0.01, 0.05)
    found = [(c, *search_max_advance(cfg, c)) for c in caps]
    write_table(out / "search.csv", ("distortion_cap", "delta_hz", "conjugate_advance_s"), found)

    for c, d, a in found:
        print(f"cap {c:<6g} best delta {d / 1e6:+.0f} MHz  conjugate advance {a * 1e9:6.2f} ns")
    try:
        plot_sweep(rows, out / "sweep.png")
        for d, tt in traces.items():
            plot_traces(tt, out / f"traces_{d:+.0f}MHz.png")
    except ImportError:
        print("matplotlib not installed; skipped plots")
    print(f"wrote results to {out}/")


if __name__ == "__main__":
    main()
