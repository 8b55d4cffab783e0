"""Two-vehicle (or n-vehicle) lane scenarios driven through the full device.

Motion is 1-D and piecewise linear. Every envelope burst samples the geometry
at its start time and assumes it constant for the burst (quasi-static), then
each sensor's bursts go through the demodulator, indicator one-shots and
audio gate. The resulting interval timelines are sampled onto a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from irsim.alert import (
    DEFAULT_ONE_SHOT,
    AudioOscillator,
    alarm_timeline,
    drive_indicators,
)
from irsim.errors import ScenarioConfigError
from irsim.intervals import Timeline, contains
from irsim.irlink import (
    CarrierBurst,
    EmitterConfig,
    PathKind,
    PathSegment,
    SensorModel,
    calibrate_range,
    demodulate,
    detection_range,
    low_intervals,
    received_irradiance,
)
from irsim.timer555 import MonostableConfig

PROTOTYPE_SPACING = 0.4  # metres
DEFAULT_SAMPLE_DT = 10e-3
TRACE_DIGITS = 9


def quantize(x: Optional[float]) -> Optional[float]:
    """Round to the 9 significant digits the trace files carry."""
    if x is None:
        return None
    return float(f"{x:.{TRACE_DIGITS}g}")


@dataclass(frozen=True)
class DeviceConfig:
    emitter: EmitterConfig = EmitterConfig()
    front_sensor: SensorModel = SensorModel()
    rear_sensor: SensorModel = SensorModel()
    one_shot: MonostableConfig = DEFAULT_ONE_SHOT
    audio: AudioOscillator = AudioOscillator()
    min_spacing: float = PROTOTYPE_SPACING

    def __post_init__(self):
        if not self.min_spacing > 0:
            raise ScenarioConfigError("min_spacing must be positive", "device.min_spacing")

    def calibrated(self) -> "DeviceConfig":
        """Copy whose emitter reaches the front sensor threshold at min_spacing."""
        emitter = calibrate_range(self.front_sensor, self.emitter, self.min_spacing)
        return replace(self, emitter=emitter)

    @property
    def range(self) -> float:
        return detection_range(self.front_sensor, self.emitter)


@dataclass(frozen=True)
class VehicleSpec:
    id: str
    initial_position: float = 0.0
    velocity_profile: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    device: Optional[DeviceConfig] = None
    reflectance: float = 0.0
    facing: int = 1  # +1: front sensor looks toward increasing position

    def __post_init__(self):
        prefix = f"vehicle[{self.id}]"
        if not math.isfinite(self.initial_position):
            raise ScenarioConfigError("position must be finite", f"{prefix}.position")
        times = [t for t, _ in self.velocity_profile]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ScenarioConfigError("velocity profile times must be sorted",
                                      f"{prefix}.velocity_profile")
        if not all(math.isfinite(t) and math.isfinite(v) for t, v in self.velocity_profile):
            raise ScenarioConfigError("velocity profile must be finite",
                                      f"{prefix}.velocity_profile")
        if not 0 <= self.reflectance <= 1:
            raise ScenarioConfigError("reflectance must be in [0, 1]", f"{prefix}.reflectance")
        if self.facing not in (1, -1):
            raise ScenarioConfigError("facing must be +1 or -1", f"{prefix}.facing")

    def position(self, t: float) -> float:
        """Exact position under the piecewise-constant velocity profile."""
        x = self.initial_position
        prof = self.velocity_profile
        for i, (t0, v) in enumerate(prof):
            if t <= t0:
                break
            t1 = prof[i + 1][0] if i + 1 < len(prof) else math.inf
            x += v * (min(t, t1) - t0)
        return x

    def velocity(self, t: float) -> float:
        v = 0.0
        for t0, vi in self.velocity_profile:
            if t0 <= t:
                v = vi
        return v


@dataclass(frozen=True)
class ScenarioConfig:
    vehicles: tuple[VehicleSpec, ...]
    t_end: float = 10.0
    sample_dt: float = DEFAULT_SAMPLE_DT
    enable_self_reflection: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ScenarioConfigError("t_end must be positive", "t_end")
        if not (math.isfinite(self.sample_dt) and self.sample_dt > 0):
            raise ScenarioConfigError("sample_dt must be positive", "sample_dt")
        if len(self.vehicles) < 1:
            raise ScenarioConfigError("a scenario needs at least one vehicle", "vehicle")
        ids = [v.id for v in self.vehicles]
        if len(set(ids)) != len(ids):
            raise ScenarioConfigError("vehicle ids must be unique", "vehicle.id")
        emitters = [v.device.emitter for v in self.vehicles if v.device is not None]
        for e in emitters:
            if e.envelope_hz <= 0:
                raise ScenarioConfigError("scenario emitters must be pulsed (envelope_hz > 0)",
                                          "device.emitter.envelope_hz")
            if (e.carrier_hz, e.envelope_hz, e.envelope_duty) != (
                    emitters[0].carrier_hz, emitters[0].envelope_hz, emitters[0].envelope_duty):
                raise ScenarioConfigError("all emitters must share carrier and envelope timing",
                                          "device.emitter")


@dataclass(frozen=True)
class VehicleSample:
    pos: float
    dist_nearest: Optional[float]
    front_rx: bool
    rear_rx: bool
    front_led: bool
    rear_led: bool
    audio: bool


@dataclass(frozen=True)
class TraceRow:
    t: float
    vehicles: tuple[VehicleSample, ...]


@dataclass(frozen=True)
class VehicleTimelines:
    """Interval-level result for one vehicle, before grid sampling."""

    front_rx: Timeline = ()
    rear_rx: Timeline = ()
    front_led: Timeline = ()
    rear_led: Timeline = ()
    audio: Timeline = ()
    tone_hz: Optional[float] = None


def _level(timeline: Timeline, t: float, t_end: float) -> bool:
    # The closing sample at t_end reads the left limit, not the clipped edge.
    if t >= t_end:
        return bool(timeline) and timeline[-1][1] >= t_end and timeline[-1][0] < t_end
    return contains(timeline, t)


def sample_times(t_end: float, dt: float) -> list[float]:
    n = int(math.floor(t_end / dt + 1e-9))
    return [quantize(k * dt) for k in range(n + 1)]


def _sensor_bursts(cfg: ScenarioConfig, i: int, side: int) -> list[CarrierBurst]:
    """Bursts reaching vehicle i's sensor facing ``side`` (+1 front, -1 rear)."""
    me = cfg.vehicles[i]
    look = me.facing * side
    template = next(v.device.emitter for v in cfg.vehicles if v.device is not None)
    out = []
    for b in template.bursts(cfg.t_end):
        x_me = me.position(b.t_start)
        total = 0.0
        for j, other in enumerate(cfg.vehicles):
            if j == i:
                continue
            gap = (other.position(b.t_start) - x_me) * look
            if gap <= 0:
                continue
            if other.device is not None:
                total += received_irradiance(other.device.emitter,
                                             PathSegment(PathKind.DIRECT, gap))
            if cfg.enable_self_reflection and me.device is not None and other.reflectance > 0:
                total += received_irradiance(
                    me.device.emitter,
                    PathSegment(PathKind.REFLECTED, 2.0 * gap, other.reflectance))
        if total > 0:
            out.append(b._replace(irradiance=total))
    return out


def vehicle_timelines(cfg: ScenarioConfig) -> list[VehicleTimelines]:
    out = []
    for i, v in enumerate(cfg.vehicles):
        dev = v.device
        if dev is None:
            out.append(VehicleTimelines())
            continue
        front_events = demodulate(dev.front_sensor, _sensor_bursts(cfg, i, +1), cfg.t_end)
        rear_events = demodulate(dev.rear_sensor, _sensor_bursts(cfg, i, -1), cfg.t_end)
        leds = drive_indicators(front_events, rear_events, dev.one_shot, cfg.t_end)
        alarm = alarm_timeline(leds.front, leds.rear, dev.audio, cfg.t_end)
        out.append(VehicleTimelines(
            front_rx=low_intervals(front_events, cfg.t_end),
            rear_rx=low_intervals(rear_events, cfg.t_end),
            front_led=leds.front,
            rear_led=leds.rear,
            audio=alarm.audio,
            tone_hz=alarm.tone_hz,
        ))
    return out


def run_scenario(cfg: ScenarioConfig) -> list[TraceRow]:
    if not isinstance(cfg, ScenarioConfig):
        raise ScenarioConfigError(f"expected ScenarioConfig, got {type(cfg).__name__}")
    timelines = vehicle_timelines(cfg)
    rows = []
    for t in sample_times(cfg.t_end, cfg.sample_dt):
        positions = [v.position(t) for v in cfg.vehicles]
        samples = []
        for i, tl in enumerate(timelines):
            gaps = [abs(p - positions[i]) for j, p in enumerate(positions) if j != i]
            samples.append(VehicleSample(
                pos=quantize(positions[i]),
                dist_nearest=quantize(min(gaps)) if gaps else None,
                front_rx=_level(tl.front_rx, t, cfg.t_end),
                rear_rx=_level(tl.rear_rx, t, cfg.t_end),
                front_led=_level(tl.front_led, t, cfg.t_end),
                rear_led=_level(tl.rear_led, t, cfg.t_end),
                audio=_level(tl.audio, t, cfg.t_end),
            ))
        rows.append(TraceRow(t=t, vehicles=tuple(samples)))
    return rows


def time_to_alarm(d0: float, relative_speed: float, min_spacing: float) -> float:
    """Seconds until a gap closing at ``relative_speed`` shrinks to min_spacing."""
    if d0 <= min_spacing:
        return 0.0
    if not relative_speed > 0:
        raise ValueError("relative_speed must be positive for a closing gap")
    return (d0 - min_spacing) / relative_speed


@dataclass(frozen=True)
class VehicleSummary:
    first_alarm: Optional[float]
    last_alarm: Optional[float]
    alarm_duration: float
    front_violations: int
    rear_violations: int


@dataclass(frozen=True)
class ScenarioSummary:
    vehicles: tuple[VehicleSummary, ...]
    min_distance: Optional[float]
    samples: int
    sample_dt: float

    @property
    def first_alarm(self) -> Optional[float]:
        times = [v.first_alarm for v in self.vehicles if v.first_alarm is not None]
        return min(times) if times else None

    def as_dict(self, ids: Optional[Sequence[str]] = None) -> dict:
        ids = list(ids) if ids is not None else [f"v{i}" for i in range(len(self.vehicles))]
        return {
            "samples": self.samples,
            "sample_dt": self.sample_dt,
            "min_distance": self.min_distance,
            "first_alarm": self.first_alarm,
            "vehicles": {
                vid: {
                    "first_alarm": v.first_alarm,
                    "last_alarm": v.last_alarm,
                    "alarm_duration": v.alarm_duration,
                    "front_violations": v.front_violations,
                    "rear_violations": v.rear_violations,
                }
                for vid, v in zip(ids, self.vehicles)
            },
        }


def _rising_edges(flags: Sequence[bool]) -> int:
    return sum(1 for k, f in enumerate(flags) if f and (k == 0 or not flags[k - 1]))


def summarize(trace: Sequence[TraceRow]) -> ScenarioSummary:
    if not trace:
        raise ValueError("cannot summarize an empty trace")
    dt = trace[1].t - trace[0].t if len(trace) > 1 else 0.0
    n = len(trace[0].vehicles)
    per_vehicle = []
    for i in range(n):
        alarm_t = [r.t for r in trace if r.vehicles[i].audio]
        per_vehicle.append(VehicleSummary(
            first_alarm=alarm_t[0] if alarm_t else None,
            last_alarm=alarm_t[-1] if alarm_t else None,
            alarm_duration=quantize(len(alarm_t) * dt),
            front_violations=_rising_edges([r.vehicles[i].front_led for r in trace]),
            rear_violations=_rising_edges([r.vehicles[i].rear_led for r in trace]),
        ))
    dists = [s.dist_nearest for r in trace for s in r.vehicles if s.dist_nearest is not None]
    return ScenarioSummary(
        vehicles=tuple(per_vehicle),
        min_distance=min(dists) if dists else None,
        samples=len(trace),
        sample_dt=quantize(dt),
    )


# ---------------------------------------------------------------------------
# Ready-made configurations
# ---------------------------------------------------------------------------


def prototype_device(min_spacing: float = PROTOTYPE_SPACING) -> DeviceConfig:
    """The prototype as built, calibrated to its measured detection boundary."""
    return DeviceConfig(min_spacing=min_spacing).calibrated()


def head_on(d0: float, relative_speed: float, *, t_end: float = 10.0,
            sample_dt: float = DEFAULT_SAMPLE_DT,
            device: Optional[DeviceConfig] = None) -> ScenarioConfig:
    """Two equipped vehicles facing each other, closing symmetrically."""
    device = device or prototype_device()
    half = relative_speed / 2.0
    return ScenarioConfig(
        vehicles=(
            VehicleSpec("A", 0.0, ((0.0, half),), device, facing=1),
            VehicleSpec("B", d0, ((0.0, -half),), device, facing=-1),
        ),
        t_end=t_end,
        sample_dt=sample_dt,
    )


def reflector(distance: float, reflectance: float = 0.3, *, t_end: float = 3.0,
              sample_dt: float = DEFAULT_SAMPLE_DT,
              device: Optional[DeviceConfig] = None) -> ScenarioConfig:
    """One equipped vehicle parked in front of a passive reflecting obstacle."""
    device = device or prototype_device()
    return ScenarioConfig(
        vehicles=(
            VehicleSpec("ego", 0.0, device=device),
            VehicleSpec("wall", distance, reflectance=reflectance),
        ),
        t_end=t_end,
        sample_dt=sample_dt,
        enable_self_reflection=True,
    )
