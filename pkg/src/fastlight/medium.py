"""Complex-wavenumber model built from signed Lorentzian lines.

Each optical channel (seed or conjugate) sees a wavenumber deviation

    k(D) = sum_j 0.5 * s_j * g_j / ((D - c_j) + i g_j)

where D is the angular detuning from the channel carrier, g_j the line
half-width and s_j the signed strength. The envelope picks up the factor
exp(i k L) over a length L, so the intensity gain is exp(-2 Im(k) L) and
a line with s_j > 0 amplifies with peak gain exp(s_j L).

Sign convention: ``strength > 0`` is gain. Absorption coefficients, where
a negative value means gain are negated when a config is parsed
(see :mod:`fastlight.config`).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

C_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class LineComponent:
    """A single Lorentzian line.

    Attributes
    ----------
    center_detuning : float
        Line center relative to the channel carrier (rad/s).
    hwhm : float
        Half-width at half-maximum (rad/s).
    strength : float
        Signed coefficient (1/m); positive = gain, negative = absorption.
    """

    center_detuning: float
    hwhm: float
    strength: float

    def __post_init__(self):
        if not math.isfinite(self.center_detuning):
            raise ValueError("center_detuning must be finite")
        if not (math.isfinite(self.hwhm) and self.hwhm > 0):
            raise ValueError("hwhm must be positive")
        if not math.isfinite(self.strength) or self.strength == 0:
            raise ValueError("strength must be finite and nonzero")


@dataclass(frozen=True)
class MediumChannel:
    """Lines seen by one optical frequency channel over a medium of given length."""

    length: float
    lines: tuple[LineComponent, ...] = ()
    background_index: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError("length must be positive")
        if not (math.isfinite(self.background_index) and self.background_index >= 1 - 1e-6):
            raise ValueError("background_index must be >= 1 - 1e-6")

    def shifted(self, carrier_detuning: float) -> MediumChannel:
        """Same medium seen from a carrier sitting at ``carrier_detuning``.

        Evaluating the result at D is equivalent to evaluating ``self`` at
        ``carrier_detuning + D``.
        """
        lines = tuple(
            LineComponent(ln.center_detuning - carrier_detuning, ln.hwhm, ln.strength)
            for ln in self.lines
        )
        return MediumChannel(self.length, lines, self.background_index)

    def with_lines(self, lines) -> MediumChannel:
        return MediumChannel(self.length, tuple(lines), self.background_index)


def vacuum_channel(length: float) -> MediumChannel:
    return MediumChannel(length=length)


@dataclass(frozen=True)
class DispersionSample:
    detuning: float
    k_complex: complex
    intensity_gain: float
    group_delay: float


def evaluate_k(channel: MediumChannel, detuning):
    """Complex wavenumber deviation (1/m) at angular ``detuning``.

    The background term ``omega * n0 / c`` is left out; propagation works
    in the frame of a vacuum reference. Accepts scalars or arrays.
    """
    d = np.asarray(detuning, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError("detuning must be finite")
    k = np.zeros(d.shape, dtype=complex)
    for ln in channel.lines:
        k += 0.5 * ln.strength * ln.hwhm / ((d - ln.center_detuning) + 1j * ln.hwhm)
    return k[()] if k.ndim == 0 else k


def dk_ddetuning(channel: MediumChannel, detuning):
    """Closed-form derivative of :func:`evaluate_k` (s/m)."""
    d = np.asarray(detuning, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError("detuning must be finite")
    dk = np.zeros(d.shape, dtype=complex)
    for ln in channel.lines:
        dk -= 0.5 * ln.strength * ln.hwhm / ((d - ln.center_detuning) + 1j * ln.hwhm) ** 2
    return dk[()] if dk.ndim == 0 else dk


def intensity_gain(channel: MediumChannel, detuning):
    """Single-pass intensity gain exp(-2 Im(k) L)."""
    return np.exp(-2.0 * np.imag(evaluate_k(channel, detuning)) * channel.length)


def group_delay_analytic(channel: MediumChannel, detuning):
    """Group delay relative to a vacuum reference, in seconds.

    ``L * Re(dk/dD) + (n0 - 1) L / c``. Negative values mean the pulse
    peak is advanced.
    """
    base = (channel.background_index - 1.0) * channel.length / C_LIGHT
    return channel.length * np.real(dk_ddetuning(channel, detuning)) + base


def _checked_grid(detuning_grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(detuning_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("empty grid")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("detuning grid must be strictly increasing")
    return grid


def gain_spectrum(channel: MediumChannel, detuning_grid) -> list[DispersionSample]:
    grid = _checked_grid(detuning_grid)
    k = evaluate_k(channel, grid)
    gain = intensity_gain(channel, grid)
    delay = group_delay_analytic(channel, grid)
    return [
        DispersionSample(float(d), complex(kk), float(g), float(t))
        for d, kk, g, t in zip(grid, np.atleast_1d(k), np.atleast_1d(gain), np.atleast_1d(delay))
    ]


def advancement_curve(channel: MediumChannel, detuning_grid) -> list[tuple[float, float]]:
    """(detuning, advancement) pairs; advancement is minus the group delay."""
    grid = _checked_grid(detuning_grid)
    adv = -np.atleast_1d(group_delay_analytic(channel, grid))
    return [(float(d), float(a)) for d, a in zip(grid, adv)]


def max_wing_advance(line: LineComponent, length: float) -> float:
    """Largest advancement a single line can produce on its own.

    A gain line peaks on its wings at D - c = +-sqrt(3) g with s L / (16 g);
    an absorption line peaks at its center with |s| L / (2 g).
    """
    if line.strength > 0:
        return line.strength * length / (16.0 * line.hwhm)
    return -line.strength * length / (2.0 * line.hwhm)


def advance_upper_bound(channel: MediumChannel) -> float:
    """Upper bound on the advancement of any detuning, from linearity of k."""
    return sum(max_wing_advance(ln, channel.length) for ln in channel.lines)
