"""Spectral propagation of envelopes through a medium channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .medium import C_LIGHT, MediumChannel, evaluate_k
from .pulse import SampledTrace, detuning_grid, to_spectrum, to_trace

WRAPAROUND_LIMIT = 1e-6
EDGE_FRACTION = 0.05


class WraparoundError(RuntimeError):
    """Output energy reached the periodic window edges."""


@dataclass(frozen=True, eq=False)
class PropagationResult:
    output: SampledTrace
    reference: SampledTrace
    transfer_samples: np.ndarray
    edge_energy_fraction: float


def relative_transfer(channel: MediumChannel, freq_grid, carrier_detuning: float = 0.0):
    """Transfer function with the common vacuum phase removed.

    ``H(D) = exp(i k(D0 + D) L) * exp(i D (n0 - 1) L / c)``; a vacuum
    channel gives exactly 1.
    """
    d = np.asarray(freq_grid, dtype=float)
    k = evaluate_k(channel, carrier_detuning + d)
    phase = 1j * k * channel.length
    if channel.background_index != 1.0:
        phase = phase + 1j * d * (channel.background_index - 1.0) * channel.length / C_LIGHT
    return np.exp(phase)


def edge_energy_fraction(trace: SampledTrace, fraction: float = EDGE_FRACTION) -> float:
    p = trace.power
    total = p.sum()
    if total == 0:
        return 0.0
    m = max(1, int(round(fraction * p.size)))
    return float((p[:m].sum() + p[-m:].sum()) / total)


def apply_transfer(trace: SampledTrace, transfer) -> SampledTrace:
    spec = to_spectrum(trace)
    spec = type(spec)(spec.f_start, spec.df, spec.samples * transfer, spec.t_start)
    return to_trace(spec)


def propagate_pulse(
    trace: SampledTrace,
    channel: MediumChannel,
    carrier_detuning: float = 0.0,
    wraparound_limit: float = WRAPAROUND_LIMIT,
) -> PropagationResult:
    """Propagate ``trace`` through ``channel``; the reference is the input itself."""
    freqs = detuning_grid(len(trace), trace.dt)
    h = relative_transfer(channel, freqs, carrier_detuning)
    out = apply_transfer(trace, h)
    frac = edge_energy_fraction(out)
    if frac >= wraparound_limit:
        raise WraparoundError(
            f"window wraparound: {frac:.3g} of output energy in the outer "
            f"{EDGE_FRACTION:.0%} of the window; use a larger window"
        )
    return PropagationResult(out, trace, h, frac)
