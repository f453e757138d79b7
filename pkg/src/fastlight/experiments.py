"""Batch runs: detuning sweeps, trace triples and the max-advance search."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .config import RunConfig
from .fourwm import channel_detunings, stimulate_conjugate
from .metrics import AdvancementMetrics, advancement
from .propagate import propagate_pulse
from .pulse import SampledTrace, synthesize


@dataclass(frozen=True)
class SweepRow:
    delta: float
    seed_advance: float
    conjugate_advance: float
    seed_gain: float
    conjugate_gain: float
    conjugate_measurable: bool
    distortions: tuple[float, float]
    pump_frequency: float = math.nan
    seed_frequency: float = math.nan
    conjugate_frequency: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


SWEEP_COLUMNS = (
    "delta_hz",
    "pump_hz",
    "seed_hz",
    "conjugate_hz",
    "seed_advance_s",
    "conjugate_advance_s",
    "seed_gain",
    "conjugate_gain",
    "conjugate_measurable",
    "seed_distortion",
    "conjugate_distortion",
    "error",
)


def row_values(row: SweepRow) -> list:
    return [
        row.delta,
        row.pump_frequency,
        row.seed_frequency,
        row.conjugate_frequency,
        row.seed_advance,
        row.conjugate_advance,
        row.seed_gain,
        row.conjugate_gain,
        int(row.conjugate_measurable),
        row.distortions[0],
        row.distortions[1],
        row.error,
    ]


@dataclass(frozen=True)
class PointResult:
    delta: float
    reference: SampledTrace
    seed: SampledTrace
    conjugate: SampledTrace
    seed_metrics: AdvancementMetrics
    conjugate_metrics: AdvancementMetrics

    @property
    def conjugate_lead(self) -> float:
        """How much earlier the conjugate peak exits than the seed peak."""
        return self.conjugate_metrics.peak_advance - self.seed_metrics.peak_advance


def simulate_point(config: RunConfig, delta: float, reference: SampledTrace | None = None) -> PointResult:
    """Seed and conjugate propagation at one two-photon detuning (Hz)."""
    if reference is None:
        reference = synthesize(config.pulse_spec, config.grid_spec)
    limit = config.thresholds.wraparound
    geometry = config.geometry_model.at(delta)
    seed_det, _ = channel_detunings(geometry, delta)
    length = config.medium.length_m
    seed = propagate_pulse(reference, config.seed_channel, seed_det, wraparound_limit=limit)
    conj = stimulate_conjugate(reference, geometry, config.conjugate_channel, wraparound_limit=limit)
    return PointResult(
        delta=float(delta),
        reference=reference,
        seed=seed.output,
        conjugate=conj.output,
        seed_metrics=advancement(seed.output, reference, length),
        conjugate_metrics=advancement(conj.output, reference, length),
    )


def _sweep_row(config: RunConfig, delta: float, reference: SampledTrace) -> SweepRow:
    geometry = config.geometry_model.at(delta)
    freqs = dict(
        pump_frequency=geometry.pump_frequency,
        seed_frequency=geometry.seed_frequency,
        conjugate_frequency=geometry.conjugate_frequency,
    )
    try:
        pt = simulate_point(config, delta, reference)
    except (ValueError, RuntimeError) as exc:
        nan = math.nan
        return SweepRow(float(delta), nan, nan, nan, nan, False, (nan, nan), error=str(exc), **freqs)
    s, c = pt.seed_metrics, pt.conjugate_metrics
    return SweepRow(
        delta=float(delta),
        seed_advance=s.peak_advance,
        conjugate_advance=c.peak_advance,
        seed_gain=s.intensity_gain,
        conjugate_gain=c.intensity_gain,
        conjugate_measurable=bool(c.intensity_gain >= config.thresholds.measurable_fraction),
        distortions=(s.distortion, c.distortion),
        **freqs,
    )


def run_detuning_sweep(config: RunConfig, deltas=None, max_workers: int = 1) -> list[SweepRow]:
    """One row per two-photon detuning, ordered by detuning.

    Rows that fail (e.g. window wraparound) carry an ``error`` message
    instead of aborting the sweep.
    """
    deltas = config.deltas_hz() if deltas is None else np.asarray(deltas, dtype=float)
    reference = synthesize(config.pulse_spec, config.grid_spec)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            rows = list(pool.map(lambda d: _sweep_row(config, d, reference), deltas))
    else:
        rows = [_sweep_row(config, d, reference) for d in deltas]
    return sorted(rows, key=lambda r: r.delta)


@dataclass(frozen=True)
class TraceTriple:
    """Peak-normalized power traces plus the factors that undo the normalization."""

    times: np.ndarray
    reference: np.ndarray
    seed: np.ndarray
    conjugate: np.ndarray
    scale: dict = field(default_factory=dict)
    point: PointResult | None = None


def run_trace_pair(config: RunConfig, delta: float) -> TraceTriple:
    pt = simulate_point(config, delta)
    ref_peak = pt.reference.power.max()
    out = {}
    scale = {}
    for name, tr in (("reference", pt.reference), ("seed", pt.seed), ("conjugate", pt.conjugate)):
        p = tr.power
        peak = p.max()
        out[name] = p / peak if peak > 0 else p
        scale[name] = float(peak / ref_peak)
    return TraceTriple(pt.reference.times, out["reference"], out["seed"], out["conjugate"], scale, pt)


def search_max_advance(config: RunConfig, distortion_cap: float, deltas=None) -> tuple[float, float]:
    """Detuning of largest measurable conjugate advancement with distortion <= cap.

    Ties go to the smaller ``|delta|``.
    """
    if distortion_cap < 0:
        raise ValueError("distortion_cap must be >= 0")
    rows = run_detuning_sweep(config, deltas)
    feasible = [
        r for r in rows if r.ok and r.conjugate_measurable and r.distortions[1] <= distortion_cap
    ]
    if not feasible:
        raise ValueError("no delta satisfies distortion cap")
    best = max(feasible, key=lambda r: (r.conjugate_advance, -abs(r.delta)))
    return best.delta, best.conjugate_advance
