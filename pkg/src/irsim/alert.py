"""Receiver decision chain: indicator one-shots, transistor gate, audio enable."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Optional

from irsim.errors import InvalidConfigError
from irsim.intervals import Timeline, breakpoints, contains, normalize
from irsim.irlink import SensorEvent
from irsim.timer555 import AstableConfig, MonostableConfig, astable_timing, simulate_monostable


class Direction(str, Enum):
    FRONT = "front"
    REAR = "rear"


# Pulse width 91k * 10u * ln 3 = 0.9997 s, the one-second indicator pulse.
DEFAULT_ONE_SHOT = MonostableConfig(r_t=91e3, c_t=10e-6)


@dataclass(frozen=True)
class GateState:
    q1_on: bool
    q2_on: bool
    q3_on: bool
    audio_enabled: bool


def gate_audio(q1_on: bool, q2_on: bool) -> GateState:
    """Q1/Q2 share a collector pull-up that biases Q3; Q3 holds audio RESET low.

    Either Q1 or Q2 conducting steals Q3's base drive, Q3 cuts off and its
    collector rises, releasing the oscillator's reset.
    """
    q1_on, q2_on = bool(q1_on), bool(q2_on)
    q3_on = not (q1_on or q2_on)
    return GateState(q1_on=q1_on, q2_on=q2_on, q3_on=q3_on, audio_enabled=not q3_on)


@dataclass(frozen=True)
class AudioOscillator:
    cfg: AstableConfig = AstableConfig(r_a=2.2e3, r_b=2.61e3, c=0.78e-6)
    nominal_hz: float = 250.0
    tolerance: float = 0.02

    def __post_init__(self):
        f = astable_timing(self.cfg).frequency
        if abs(f - self.nominal_hz) > self.tolerance * self.nominal_hz:
            raise InvalidConfigError(
                f"audio astable runs at {f:.4g} Hz, more than "
                f"{self.tolerance:.0%} away from {self.nominal_hz} Hz"
            )

    @property
    def frequency(self) -> float:
        return astable_timing(self.cfg).frequency


@dataclass(frozen=True)
class IndicatorChannel:
    direction: Direction
    one_shot: MonostableConfig = DEFAULT_ONE_SHOT
    led_on: bool = False
    active_until: Optional[float] = None

    @classmethod
    def at(cls, direction: Direction, one_shot: MonostableConfig, timeline: Timeline,
           t: float) -> "IndicatorChannel":
        """Snapshot of a channel at time ``t`` given its LED timeline."""
        for a, b in timeline:
            if a <= t < b:
                return cls(direction, one_shot, True, b)
        return cls(direction, one_shot, False, None)


class IndicatorTimelines(NamedTuple):
    front: Timeline
    rear: Timeline


class AlarmTimeline(NamedTuple):
    audio: Timeline
    tone_hz: float


def _one_shot_timeline(events: Iterable[SensorEvent], one_shot: MonostableConfig,
                       t_end: float) -> Timeline:
    # Sensor output drives the trigger pin directly: low = trigger asserted.
    triggers = [(e.t, "fall" if e.level == 0 else "rise") for e in events if e.t <= t_end]
    if not triggers:
        return []
    trace = simulate_monostable(one_shot, triggers, t_end=t_end)
    return normalize(trace.intervals("output"))


def drive_indicators(sensor_events_front: Iterable[SensorEvent],
                     sensor_events_rear: Iterable[SensorEvent],
                     one_shot: MonostableConfig, t_end: float) -> IndicatorTimelines:
    return IndicatorTimelines(
        front=_one_shot_timeline(sensor_events_front, one_shot, t_end),
        rear=_one_shot_timeline(sensor_events_rear, one_shot, t_end),
    )


def alarm_timeline(front_led: Timeline, rear_led: Timeline, audio: AudioOscillator,
                   t_end: float) -> AlarmTimeline:
    """Audio is enabled wherever the gate says so between LED breakpoints."""
    points = [t for t in breakpoints(front_led, rear_led) if t < t_end]
    enabled = []
    for a, b in zip(points, points[1:] + [t_end]):
        if b <= a:
            continue
        if gate_audio(contains(front_led, a), contains(rear_led, a)).audio_enabled:
            enabled.append((a, b))
    return AlarmTimeline(audio=normalize(enabled), tone_hz=audio.frequency)
