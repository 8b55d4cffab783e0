import itertools

import pytest

from irsim.alert import (
    DEFAULT_ONE_SHOT,
    AudioOscillator,
    Direction,
    IndicatorChannel,
    alarm_timeline,
    drive_indicators,
    gate_audio,
)
from irsim.errors import InvalidConfigError
from irsim.intervals import breakpoints, contains
from irsim.irlink import EmitterConfig, SensorEvent, SensorModel, demodulate
from irsim.timer555 import LN3, AstableConfig

WIDTH = DEFAULT_ONE_SHOT.tau * LN3


@pytest.mark.parametrize("q1, q2", list(itertools.product([False, True], repeat=2)))
def test_gate_truth_table(q1, q2):
    g = gate_audio(q1, q2)
    assert g.q3_on == (not (q1 or q2))
    assert g.audio_enabled == (q1 or q2)
    assert g.audio_enabled == (not g.q3_on)


def test_gate_examples():
    assert gate_audio(False, False).q3_on and not gate_audio(False, False).audio_enabled
    assert gate_audio(True, False).audio_enabled and not gate_audio(True, False).q3_on
    assert gate_audio(True, True).audio_enabled


def test_default_audio_tone():
    audio = AudioOscillator()
    assert audio.frequency == pytest.approx(248.8078, abs=1e-3)
    assert abs(audio.frequency - 250) / 250 < 0.02


def test_audio_tolerance_enforced():
    with pytest.raises(InvalidConfigError):
        AudioOscillator(cfg=AstableConfig(1e3, 1e3, 1e-6))


def test_single_front_edge_lights_front_led():
    ev = [SensorEvent(2.0, 0), SensorEvent(2.0006, 1)]
    leds = drive_indicators(ev, [], DEFAULT_ONE_SHOT, 5.0)
    assert leds.front == [(2.0, pytest.approx(2.0 + WIDTH))]
    assert leds.rear == []


def test_rear_only_never_lights_front():
    ev = [SensorEvent(1.0, 0), SensorEvent(1.01, 1)]
    leds = drive_indicators([], ev, DEFAULT_ONE_SHOT, 5.0)
    assert leds.front == [] and len(leds.rear) == 1


def test_seven_hertz_retriggers_in_one_second_blocks():
    ev = demodulate(SensorModel(), EmitterConfig().bursts(5.0, 2.0), 5.0)
    leds = drive_indicators(ev, [], DEFAULT_ONE_SHOT, 5.0)
    starts = [a for a, _ in leds.front]
    assert starts == pytest.approx([0.0, 1.0, 2.0, 3.0, 4.0])
    for a, b in leds.front[:-1]:
        assert b - a == pytest.approx(WIDTH)
    gaps = [b[0] - a[1] for a, b in zip(leds.front, leds.front[1:])]
    assert all(0 < g < 1 / 7 for g in gaps)


def test_led_latency_is_zero():
    falls = [0.3, 2.1]
    ev = [e for t in falls for e in (SensorEvent(t, 0), SensorEvent(t + 1e-3, 1))]
    leds = drive_indicators(ev, [], DEFAULT_ONE_SHOT, 4.0)
    assert [a for a, _ in leds.front] == falls


def test_no_events_no_light():
    leds = drive_indicators([], [], DEFAULT_ONE_SHOT, 3.0)
    assert leds == ([], [])


def test_alarm_union():
    alarm = alarm_timeline([(2, 3)], [(2.5, 4)], AudioOscillator(), 10)
    assert alarm.audio == [(2, 4)]
    assert alarm.tone_hz == pytest.approx(AudioOscillator().frequency)
    assert alarm_timeline([], [], AudioOscillator(), 10).audio == []


def test_alarm_matches_gate_pointwise():
    front = [(0.5, 1.5), (3.0, 4.0)]
    rear = [(1.0, 2.0), (4.0, 4.5)]
    alarm = alarm_timeline(front, rear, AudioOscillator(), 5.0).audio
    for t in breakpoints(front, rear) + [k * 0.05 for k in range(100)]:
        assert contains(alarm, t) == gate_audio(contains(front, t), contains(rear, t)).audio_enabled


def test_indicator_channel_snapshot():
    ch = IndicatorChannel.at(Direction.FRONT, DEFAULT_ONE_SHOT, [(1.0, 2.0)], 1.5)
    assert ch.led_on and ch.active_until == 2.0
    off = IndicatorChannel.at(Direction.FRONT, DEFAULT_ONE_SHOT, [(1.0, 2.0)], 2.0)
    assert not off.led_on and off.active_until is None
