"""Four-wave-mixing frequency bookkeeping and stimulated conjugate generation.

Two pump photons become one seed and one conjugate photon, so
``2 * pump = seed + conjugate``. Frequencies here are in Hz relative to
the Rb D1 line; channel detunings are angular (rad/s).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np

from .medium import MediumChannel
from .propagate import (
    WRAPAROUND_LIMIT,
    PropagationResult,
    apply_transfer,
    edge_energy_fraction,
    relative_transfer,
    WraparoundError,
    EDGE_FRACTION,
)
from .pulse import SampledTrace, detuning_grid


@dataclass(frozen=True)
class FourWMGeometry:
    pump_detuning: float = 400e6
    seed_offset: float = 3e9
    two_photon_detuning: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.coupling) and self.coupling >= 0):
            raise ValueError("coupling must be >= 0")

    @property
    def conjugate_offset(self) -> float:
        return -self.seed_offset

    @property
    def pump_frequency(self) -> float:
        return self.pump_detuning

    @property
    def seed_frequency(self) -> float:
        return self.pump_detuning + self.seed_offset + self.two_photon_detuning

    @property
    def conjugate_frequency(self) -> float:
        return conjugate_frequency(self.pump_frequency, self.seed_frequency)

    def at(self, delta: float) -> FourWMGeometry:
        return replace(self, two_photon_detuning=delta)


def conjugate_frequency(pump: float, seed: float) -> float:
    return 2 * pump - seed


def channel_detunings(geometry: FourWMGeometry | None, delta: float) -> tuple[float, float]:
    """Carrier detunings (seed, conjugate) in rad/s for two-photon detuning ``delta`` (Hz).

    Raising the seed frequency lowers the conjugate by the same amount.
    """
    w = 2 * np.pi * delta
    return float(w), float(-w)


def stimulate_conjugate(
    seed_input: SampledTrace,
    geometry: FourWMGeometry,
    conjugate_channel: MediumChannel,
    wraparound_limit: float = WRAPAROUND_LIMIT,
) -> PropagationResult:
    """Conjugate pulse seeded by ``seed_input`` and filtered by the conjugate channel.

    The generated envelope is ``coupling * conj(seed)``; it is then
    propagated at the mirrored carrier detuning. The reference of the
    result is the unscaled seed input (the pump-blocked measurement).
    """
    _, conj_det = channel_detunings(geometry, geometry.two_photon_detuning)
    generated = seed_input.with_samples(geometry.coupling * np.conj(seed_input.samples))
    freqs = detuning_grid(len(seed_input), seed_input.dt)
    h = relative_transfer(conjugate_channel, freqs, conj_det)
    out = apply_transfer(generated, h)
    frac = edge_energy_fraction(out)
    if frac >= wraparound_limit:
        raise WraparoundError(
            f"window wraparound: {frac:.3g} of conjugate energy in the outer "
            f"{EDGE_FRACTION:.0%} of the window; use a larger window"
        )
    return PropagationResult(out, seed_input, h, frac)
