"""Run configuration: strict YAML parsing in lab units and absorption signs.

Line coefficients in the file are absorption coefficients, where a
negative ``alpha_per_m`` means gain. They are negated into the internal
``strength`` (positive = gain) when channels are built. Linewidths are
HWHM in MHz of ordinary frequency; centers are in MHz relative to the
channel carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from importlib import resources
import math
from pathlib import Path

import numpy as np
import yaml

from .fourwm import FourWMGeometry
from .medium import LineComponent, MediumChannel
from .pulse import GridSpec, PulseSpec

TWO_PI_MHZ = 2 * np.pi * 1e6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LineSpec:
    alpha_per_m: float
    gamma_mhz: float
    center_mhz: float = 0.0

    def to_component(self) -> LineComponent:
        if not self.gamma_mhz > 0:
            raise ConfigError("hwhm must be positive (gamma_mhz)")
        if self.alpha_per_m == 0:
            raise ConfigError("alpha_per_m must be nonzero")
        return LineComponent(
            center_detuning=TWO_PI_MHZ * self.center_mhz,
            hwhm=TWO_PI_MHZ * self.gamma_mhz,
            strength=-self.alpha_per_m,
        )


@dataclass(frozen=True)
class MediumSection:
    length_m: float = 0.017
    background_index: float = 1.0
    seed_lines: tuple[LineSpec, ...] = ()
    conjugate_lines: tuple[LineSpec, ...] = ()


@dataclass(frozen=True)
class GeometrySection:
    pump_detuning_mhz: float = 400.0
    seed_offset_mhz: float = 3000.0
    coupling: float = 1.0


@dataclass(frozen=True)
class SweepSection:
    delta_mhz: float = 23.0
    delta_start_mhz: float = -30.0
    delta_stop_mhz: float = 50.0
    delta_step_mhz: float = 1.0


@dataclass(frozen=True)
class PulseSection:
    shape: str = "gaussian"
    fwhm_ns: float = 200.0
    peak_amplitude: float = 1.0
    center_ns: float = 2000.0


@dataclass(frozen=True)
class GridSection:
    window_ns: float = 4000.0
    n_points: int = 4096


@dataclass(frozen=True)
class ThresholdSection:
    measurable_fraction: float = 0.02
    distortion_cap: float = 0.05
    wraparound: float = 1e-6


@dataclass(frozen=True)
class RunConfig:
    medium: MediumSection = field(default_factory=MediumSection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    sweep: SweepSection = field(default_factory=SweepSection)
    pulse: PulseSection = field(default_factory=PulseSection)
    grid: GridSection = field(default_factory=GridSection)
    thresholds: ThresholdSection = field(default_factory=ThresholdSection)

    def __post_init__(self):
        # build everything once so invariant violations surface at parse time
        try:
            self.seed_channel
            self.conjugate_channel
            self.geometry_model
            self.pulse_spec
            self.grid_spec
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        sw = self.sweep
        if not sw.delta_step_mhz > 0 or sw.delta_stop_mhz < sw.delta_start_mhz:
            raise ConfigError("sweep: need delta_step_mhz > 0 and delta_stop_mhz >= delta_start_mhz")
        th = self.thresholds
        if not th.measurable_fraction >= 0:
            raise ConfigError("thresholds.measurable_fraction must be >= 0")
        if not th.distortion_cap >= 0:
            raise ConfigError("thresholds.distortion_cap must be >= 0")
        if not th.wraparound > 0:
            raise ConfigError("thresholds.wraparound must be positive")
        if self.grid.window_ns < 8 * self.pulse.fwhm_ns:
            raise ConfigError("grid.window_ns must be at least 8 x pulse.fwhm_ns")

    def _channel(self, lines) -> MediumChannel:
        m = self.medium
        return MediumChannel(
            length=m.length_m,
            lines=tuple(ln.to_component() for ln in lines),
            background_index=m.background_index,
        )

    @property
    def seed_channel(self) -> MediumChannel:
        return self._channel(self.medium.seed_lines)

    @property
    def conjugate_channel(self) -> MediumChannel:
        return self._channel(self.medium.conjugate_lines)

    @property
    def geometry_model(self) -> FourWMGeometry:
        g = self.geometry
        return FourWMGeometry(
            pump_detuning=g.pump_detuning_mhz * 1e6,
            seed_offset=g.seed_offset_mhz * 1e6,
            two_photon_detuning=self.sweep.delta_mhz * 1e6,
            coupling=g.coupling,
        )

    @property
    def pulse_spec(self) -> PulseSpec:
        p = self.pulse
        return PulseSpec(
            fwhm=p.fwhm_ns * 1e-9,
            peak_amplitude=p.peak_amplitude,
            center_time=p.center_ns * 1e-9,
            shape=p.shape,
        )

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec(window=self.grid.window_ns * 1e-9, n_points=self.grid.n_points)

    def deltas_hz(self) -> np.ndarray:
        sw = self.sweep
        n = int(math.floor((sw.delta_stop_mhz - sw.delta_start_mhz) / sw.delta_step_mhz + 1e-9)) + 1
        return (sw.delta_start_mhz + sw.delta_step_mhz * np.arange(n)) * 1e6


_SECTIONS = {
    "medium": MediumSection,
    "geometry": GeometrySection,
    "sweep": SweepSection,
    "pulse": PulseSection,
    "grid": GridSection,
    "thresholds": ThresholdSection,
}


def _number(section: str, key: str, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}: must be finite")
    return value


def _parse_lines(section: str, raw) -> tuple[LineSpec, ...]:
    if not isinstance(raw, list):
        raise ConfigError(f"{section}: expected a list of lines")
    out = []
    allowed = {f.name for f in fields(LineSpec)}
    for i, item in enumerate(raw):
        where = f"{section}[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{where}: expected a mapping")
        unknown = set(item) - allowed
        if unknown:
            raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
        for key in ("alpha_per_m", "gamma_mhz"):
            if key not in item:
                raise ConfigError(f"{where}: missing key {key!r}")
        spec = LineSpec(**{k: _number(where, k, v) for k, v in item.items()})
        if not spec.gamma_mhz > 0:
            raise ConfigError(f"{where}.gamma_mhz: hwhm must be positive")
        if spec.alpha_per_m == 0:
            raise ConfigError(f"{where}.alpha_per_m: zero-strength lines are not allowed")
        out.append(spec)
    return tuple(out)


def _parse_section(name: str, raw) -> object:
    cls = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a mapping")
    allowed = {f.name: f for f in fields(cls)}
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {sorted(unknown)}")
    values = {}
    for key, value in raw.items():
        if key in ("seed_lines", "conjugate_lines"):
            values[key] = _parse_lines(f"{name}.{key}", value)
        elif key == "shape":
            if not isinstance(value, str):
                raise ConfigError(f"{name}.shape: expected a string")
            values[key] = value
        elif key == "n_points":
            values[key] = _number(name, key, value, int)
        else:
            values[key] = _number(name, key, value)
    return cls(**values)


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    missing = set(_SECTIONS) - set(raw)
    if missing:
        raise ConfigError(f"missing section(s) {sorted(missing)}")
    return RunConfig(**{name: _parse_section(name, raw[name]) for name in _SECTIONS})


def config_to_dict(cfg: RunConfig) -> dict:
    def line(ln: LineSpec):
        return {"alpha_per_m": ln.alpha_per_m, "gamma_mhz": ln.gamma_mhz, "center_mhz": ln.center_mhz}

    out = {}
    for name in _SECTIONS:
        section = getattr(cfg, name)
        d = {}
        for f in fields(section):
            v = getattr(section, f.name)
            d[f.name] = [line(x) for x in v] if f.name.endswith("_lines") else v
        out[name] = d
    return out


def default_config_path() -> Path:
    return Path(str(resources.files("fastlight") / "data" / "default.yaml"))


def load_config(path) -> RunConfig:
    """Load and validate a config file; ``"default"`` selects the shipped one."""
    if str(path) == "default":
        path = default_config_path()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return config_from_dict(raw)


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False), encoding="utf-8")
