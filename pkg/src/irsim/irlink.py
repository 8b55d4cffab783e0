"""Modulated IR emitter, inverse-square propagation and the demodulating sensor.

Carrier is handled as burst envelopes ``(t_start, t_end, carrier_hz,
irradiance)``; individual 38 kHz cycles are never materialised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, NamedTuple

from irsim.errors import InvalidConfigError, InvalidPathError, InvalidStimulusError
from irsim.timer555 import led_current

# Relative slack on threshold and band-edge comparisons, so a path that sits
# exactly on the calibrated boundary is not lost to round-off.
THRESHOLD_RTOL = 1e-9


@dataclass(frozen=True)
class LedDrive:
    vcc: float = 9.0
    v_led: float = 1.7
    n_series: int = 2
    r_s: float = 220.0

    def __post_init__(self):
        if self.n_series < 1:
            raise InvalidConfigError(f"n_series must be >= 1, got {self.n_series}")
        if not self.r_s > 0:
            raise InvalidConfigError(f"r_s must be positive, got {self.r_s}")

    @property
    def current(self) -> float:
        return led_current(self.vcc, self.v_led, self.n_series, self.r_s)

    def with_current(self, i_led: float) -> "LedDrive":
        """Same string with ``r_s`` chosen to draw ``i_led``."""
        if not i_led > 0:
            raise InvalidConfigError(f"i_led must be positive, got {i_led}")
        headroom = self.vcc - self.n_series * self.v_led
        if headroom <= 0:
            raise InvalidConfigError("LED string has no forward headroom")
        return replace(self, r_s=headroom / i_led)


@dataclass(frozen=True)
class EmitterConfig:
    carrier_hz: float = 38_000.0
    envelope_hz: float = 7.0  # 0 means continuous carrier
    envelope_duty: float = 0.5
    drive: LedDrive = LedDrive()
    radiance_coeff: float = 1.0

    def __post_init__(self):
        if not self.carrier_hz > 0:
            raise InvalidConfigError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not 0 < self.envelope_duty <= 1:
            raise InvalidConfigError(f"envelope_duty must be in (0, 1], got {self.envelope_duty}")
        if not self.envelope_hz >= 0:
            raise InvalidConfigError(f"envelope_hz must be >= 0, got {self.envelope_hz}")
        if not self.radiance_coeff >= 0:
            raise InvalidConfigError(f"radiance_coeff must be >= 0, got {self.radiance_coeff}")

    @property
    def source_strength(self) -> float:
        """k * n * i_led: irradiance times distance squared on a direct path."""
        return self.radiance_coeff * self.drive.n_series * self.drive.current

    def bursts(self, t_end: float, irradiance: float = 1.0) -> list["CarrierBurst"]:
        """Envelope bursts phase-locked to t = 0 over ``[0, t_end]``."""
        if self.envelope_hz == 0:
            return [CarrierBurst(0.0, t_end, self.carrier_hz, irradiance)]
        out = []
        k = 0
        while True:
            start = k / self.envelope_hz
            if start >= t_end:
                break
            end = min((k + self.envelope_duty) / self.envelope_hz, t_end)
            out.append(CarrierBurst(start, end, self.carrier_hz, irradiance))
            k += 1
        return out


class PathKind(str, Enum):
    DIRECT = "direct"
    REFLECTED = "reflected"


@dataclass(frozen=True)
class PathSegment:
    kind: PathKind
    distance: float
    reflectance: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.distance) and self.distance > 0):
            raise InvalidPathError(f"path distance must be positive, got {self.distance}")
        if not 0 <= self.reflectance <= 1:
            raise InvalidPathError(f"reflectance must be in [0, 1], got {self.reflectance}")
        if self.kind is PathKind.DIRECT and self.reflectance != 1.0:
            raise InvalidPathError("a direct path has reflectance 1.0")


@dataclass(frozen=True)
class SensorModel:
    center_hz: float = 38_000.0
    band_halfwidth_hz: float = 4_000.0
    sensitivity: float = 1.0
    min_burst_cycles: int = 10
    blind_after: float = 50e-3
    output_low_width: float = 600e-6

    def __post_init__(self):
        for name in ("center_hz", "band_halfwidth_hz", "sensitivity", "min_burst_cycles",
                     "blind_after", "output_low_width"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfigError(f"{name} must be positive, got {value!r}")
        if self.band_halfwidth_hz >= self.center_hz:
            raise InvalidConfigError("band must lie above 0 Hz")

    def in_band(self, carrier_hz: float) -> bool:
        edge = self.band_halfwidth_hz * (1 + THRESHOLD_RTOL)
        return abs(carrier_hz - self.center_hz) <= edge

    def above_threshold(self, irradiance: float) -> bool:
        return irradiance >= self.sensitivity * (1 - THRESHOLD_RTOL)

    def settle_time(self, carrier_hz: float) -> float:
        return self.min_burst_cycles / carrier_hz


class CarrierBurst(NamedTuple):
    t_start: float
    t_end: float
    carrier_hz: float
    irradiance: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


class SensorEvent(NamedTuple):
    """Sensor output transition; ``level`` 0 means carrier detected."""

    t: float
    level: int


def received_irradiance(emitter: EmitterConfig, path: PathSegment) -> float:
    if not path.distance > 0:
        raise InvalidPathError("zero-length path")
    return path.reflectance * emitter.source_strength / path.distance ** 2


def calibrate_range(sensor: SensorModel, emitter: EmitterConfig,
                    target_range: float) -> EmitterConfig:
    """Return ``emitter`` with ``radiance_coeff`` set so a direct path of
    ``target_range`` lands exactly on the sensor threshold."""
    if not target_range > 0:
        raise InvalidConfigError(f"target_range must be positive, got {target_range}")
    drive_term = emitter.drive.n_series * emitter.drive.current
    if drive_term <= 0:
        raise InvalidConfigError("cannot calibrate an emitter that draws no current")
    k = sensor.sensitivity * target_range ** 2 / drive_term
    return replace(emitter, radiance_coeff=k)


def detection_range(sensor: SensorModel, emitter: EmitterConfig,
                    reflectance: float = 1.0) -> float:
    """Total optical path length at which irradiance equals the sensitivity."""
    return math.sqrt(reflectance * emitter.source_strength / sensor.sensitivity)


def self_reflection_range(sensor: SensorModel, emitter: EmitterConfig,
                          reflectance: float) -> float:
    """Obstacle distance at which a device sees its own beam bounce back.

    The reflected path is out and back, so this is half the path range.
    """
    return detection_range(sensor, emitter, reflectance) / 2.0


def _coerce_bursts(bursts: Iterable) -> list[CarrierBurst]:
    out = [b if isinstance(b, CarrierBurst) else CarrierBurst(*b) for b in bursts]
    prev_end = -math.inf
    for b in out:
        if b.t_end < b.t_start:
            raise InvalidStimulusError(f"burst ends before it starts: {b}")
        if b.t_start < prev_end:
            raise InvalidStimulusError(f"bursts overlap or are unsorted at t={b.t_start}")
        prev_end = b.t_end
    return out


def demodulate(sensor: SensorModel, carrier_bursts: Iterable, t_end: float) -> list[SensorEvent]:
    """Active-low sensor output for a sequence of carrier bursts.

    A burst is seen when its carrier is in band, its irradiance reaches the
    sensitivity and it lasts at least ``min_burst_cycles`` carrier cycles.
    Back-to-back qualifying bursts of the same carrier merge into one
    continuous carrier. Each qualifying carrier episode pulls the output low
    once, at its onset:

    * episodes longer than ``blind_after`` saturate the AGC: the output is
      low for ``output_low_width`` then stays high until the carrier stops;
    * shorter episodes hold the output low for the burst minus half the
      settling window, so the pulse is always shorter than the burst.
    """
    bursts = _coerce_bursts(carrier_bursts)

    episodes: list[list[float]] = []  # [start, end, carrier_hz]
    for b in bursts:
        if not (sensor.in_band(b.carrier_hz) and sensor.above_threshold(b.irradiance)):
            continue
        if b.duration <= 0:
            continue
        if episodes and episodes[-1][1] == b.t_start and math.isclose(
                episodes[-1][2], b.carrier_hz, rel_tol=1e-12):
            episodes[-1][1] = b.t_end
        else:
            episodes.append([b.t_start, b.t_end, b.carrier_hz])

    events: list[SensorEvent] = []
    for start, end, carrier in episodes:
        if start > t_end:
            break
        duration = end - start
        settle = sensor.settle_time(carrier)
        if duration < settle * (1 - THRESHOLD_RTOL):
            continue
        if duration > sensor.blind_after:
            width = min(sensor.output_low_width, duration - settle / 2)
        else:
            width = duration - settle / 2
        events.append(SensorEvent(start, 0))
        if start + width <= t_end:
            events.append(SensorEvent(start + width, 1))
    return events


def low_intervals(events: Iterable[SensorEvent], t_end: float) -> list[tuple[float, float]]:
    """Intervals on which the sensor output is low."""
    out = []
    start = None
    for e in events:
        if e.level == 0 and start is None:
            start = e.t
        elif e.level == 1 and start is not None:
            out.append((start, e.t))
            start = None
    if start is not None and t_end > start:
        out.append((start, t_end))
    return out
