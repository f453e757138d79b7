"""Pulse envelopes on uniform time grids and their discrete spectra.

Transform convention: ``S(D) = dt * sum_n x_n exp(+i D n dt)`` with D an
angular detuning, so that multiplying by ``exp(i D tau)`` delays the
envelope by ``tau``. Spectra are ordered from negative to positive
detuning and referenced to the first time sample.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PulseSpec:
    fwhm: float
    peak_amplitude: float = 1.0
    center_time: float = 0.0
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise ValueError(f"unsupported pulse shape {self.shape!r}")
        if not self.fwhm > 0:
            raise ValueError("fwhm must be positive")
        if not self.peak_amplitude > 0:
            raise ValueError("peak_amplitude must be positive")


@dataclass(frozen=True)
class GridSpec:
    window: float
    n_points: int = 4096

    def __post_init__(self):
        if not self.window > 0:
            raise ValueError("window must be positive")
        if not (_is_pow2(self.n_points) and 2**10 <= self.n_points <= 2**22):
            raise ValueError("n_points must be a power of two in [2^10, 2^22]")

    @property
    def dt(self) -> float:
        return self.window / self.n_points


@dataclass(frozen=True, eq=False)
class SampledTrace:
    """Envelope samples on ``t_start + n * dt``.

    Samples are real for synthesized and ingested pulses; propagated
    fields are complex.
    """

    t_start: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if not np.iscomplexobj(samples):
            samples = samples.astype(float)
        object.__setattr__(self, "samples", samples)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if samples.ndim != 1 or samples.size < 16:
            raise ValueError("a trace needs at least 16 samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("trace samples must be finite")

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.samples.size)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def with_samples(self, samples) -> SampledTrace:
        return SampledTrace(self.t_start, self.dt, samples)

    def same_grid(self, other: SampledTrace) -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
            and math.isclose(self.t_start, other.t_start, rel_tol=1e-12, abs_tol=1e-12 * self.dt)
        )


@dataclass(frozen=True, eq=False)
class Spectrum:
    f_start: float
    df: float
    samples: np.ndarray
    t_start: float = 0.0

    def __post_init__(self):
        if not self.df > 0:
            raise ValueError("df must be positive")

    @property
    def detunings(self) -> np.ndarray:
        return self.f_start + self.df * np.arange(self.samples.size)


def detuning_grid(n: int, dt: float) -> np.ndarray:
    """Angular detunings of an n-point spectrum, negative to positive."""
    return 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, dt))


def synthesize(spec: PulseSpec, grid: GridSpec, t_start: float = 0.0) -> SampledTrace:
    if grid.window < 8 * spec.fwhm:
        raise ValueError(
            f"window/fwhm violation: window {grid.window:g} s < 8 x fwhm {spec.fwhm:g} s"
        )
    t = t_start + grid.dt * np.arange(grid.n_points)
    a = spec.peak_amplitude * np.exp(-4 * np.log(2) * (t - spec.center_time) ** 2 / spec.fwhm**2)
    return SampledTrace(t_start, grid.dt, a)


def to_spectrum(trace: SampledTrace) -> Spectrum:
    n = len(trace)
    if not _is_pow2(n):
        raise ValueError(f"trace length {n} is not a power of two")
    s = np.fft.fftshift(np.fft.ifft(trace.samples)) * (n * trace.dt)
    df = 2 * np.pi / (n * trace.dt)
    return Spectrum(-df * (n // 2), df, s, trace.t_start)


def to_trace(spectrum: Spectrum) -> SampledTrace:
    n = spectrum.samples.size
    if not _is_pow2(n):
        raise ValueError(f"spectrum length {n} is not a power of two")
    dt = 2 * np.pi / (n * spectrum.df)
    x = np.fft.fft(np.fft.ifftshift(spectrum.samples)) / (n * dt)
    return SampledTrace(spectrum.t_start, dt, x)


def trace_energy(trace: SampledTrace) -> float:
    return float(np.sum(trace.power) * trace.dt)


def spectrum_energy(spectrum: Spectrum) -> float:
    return float(np.sum(np.abs(spectrum.samples) ** 2) * spectrum.df / (2 * np.pi))


def real_if_close(trace: SampledTrace, tol: float = 1e-12) -> SampledTrace:
    """Drop an imaginary part that is pure round-off."""
    s = trace.samples
    if np.iscomplexobj(s) and np.max(np.abs(s.imag)) <= tol * max(np.max(np.abs(s)), 1e-300):
        return trace.with_samples(s.real)
    return trace
