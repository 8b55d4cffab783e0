import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsim.errors import InvalidPathError, InvalidStimulusError
from irsim.irlink import (
    CarrierBurst,
    EmitterConfig,
    LedDrive,
    PathKind,
    PathSegment,
    SensorEvent,
    SensorModel,
    calibrate_range,
    demodulate,
    detection_range,
    low_intervals,
    received_irradiance,
    self_reflection_range,
)

SENSOR = SensorModel()
PROTO = calibrate_range(SENSOR, EmitterConfig(), 0.4)


def direct(d):
    return PathSegment(PathKind.DIRECT, d)


def test_inverse_square():
    e = EmitterConfig()
    assert received_irradiance(e, direct(0.8)) == pytest.approx(
        received_irradiance(e, direct(0.4)) / 4)


def test_calibrated_emitter_hits_threshold_at_prototype_range():
    assert received_irradiance(PROTO, direct(0.4)) == pytest.approx(SENSOR.sensitivity)


def test_reflectance_scales_linearly():
    half = received_irradiance(PROTO, PathSegment(PathKind.REFLECTED, 0.6, 0.5))
    assert half == pytest.approx(received_irradiance(PROTO, direct(0.6)) / 2)


@pytest.mark.parametrize("kwargs", [
    dict(kind=PathKind.DIRECT, distance=0.0),
    dict(kind=PathKind.DIRECT, distance=-1.0),
    dict(kind=PathKind.REFLECTED, distance=1.0, reflectance=1.5),
    dict(kind=PathKind.DIRECT, distance=1.0, reflectance=0.5),
])
def test_invalid_paths(kwargs):
    with pytest.raises(InvalidPathError):
        PathSegment(**kwargs)


def test_calibration_constant():
    # k = 0.4^2 / (2 * (9 - 3.4) / 220)
    assert PROTO.radiance_coeff == pytest.approx(0.16 * 220 / 11.2, rel=1e-12)
    assert PROTO.radiance_coeff == pytest.approx(3.142857, abs=1e-6)
    far = calibrate_range(SENSOR, EmitterConfig(), 0.8)
    assert far.radiance_coeff == pytest.approx(4 * PROTO.radiance_coeff)


def test_detection_range_examples():
    assert detection_range(SENSOR, PROTO) == pytest.approx(0.4, rel=1e-12)
    assert detection_range(SENSOR, PROTO, reflectance=0.25) == pytest.approx(0.2)
    bright = EmitterConfig(drive=PROTO.drive.with_current(4 * PROTO.drive.current),
                           radiance_coeff=PROTO.radiance_coeff)
    assert detection_range(SENSOR, bright) == pytest.approx(0.8)


def test_self_reflection_range():
    assert self_reflection_range(SENSOR, PROTO, 0.3) == pytest.approx(0.4 * math.sqrt(0.3) / 2)


@settings(max_examples=100)
@given(st.floats(0.01, 10.0), st.floats(0.1, 3.0))
def test_calibration_round_trip(target, sensitivity):
    s = SensorModel(sensitivity=sensitivity)
    e = calibrate_range(s, EmitterConfig(), target)
    assert abs(detection_range(s, e) - target) / target < 1e-9


@settings(max_examples=100)
@given(st.floats(1e-3, 1.0), st.floats(1e-3, 1.0), st.integers(1, 4), st.integers(1, 4),
       st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_detection_monotone(i1, i2, n1, n2, r1, r2):
    lo_i, hi_i = sorted((i1, i2))
    lo_n, hi_n = sorted((n1, n2))
    lo_r, hi_r = sorted((r1, r2))
    base = LedDrive(vcc=20.0, n_series=lo_n)
    low = EmitterConfig(drive=base.with_current(lo_i), radiance_coeff=1.0)
    high = EmitterConfig(drive=LedDrive(vcc=20.0, n_series=hi_n).with_current(hi_i),
                         radiance_coeff=2.0)
    assert detection_range(SENSOR, low, lo_r) <= detection_range(SENSOR, high, hi_r) * (1 + 1e-12)


# --------------------------------------------------------------------------
# demodulator
# --------------------------------------------------------------------------


def test_mode1_continuous_carrier_one_pulse():
    ev = demodulate(SENSOR, [CarrierBurst(0.0, 1.0, 38e3, 2.0)], 1.0)
    assert [e.level for e in ev] == [0, 1]
    assert ev[0].t == 0.0
    assert ev[1].t == pytest.approx(SENSOR.output_low_width)


def test_mode1_chunked_carrier_merges():
    chunks = [CarrierBurst(k * 0.1, (k + 1) * 0.1, 38e3, 2.0) for k in range(10)]
    # exact abutment is required to merge; build with shared endpoints
    chunks = [CarrierBurst(a.t_start, b.t_start, 38e3, 2.0) for a, b in zip(chunks, chunks[1:])]
    ev = demodulate(SENSOR, chunks, 1.0)
    assert len(ev) == 2


def test_mode2_seven_hertz():
    ev = demodulate(SENSOR, EmitterConfig().bursts(1.0, 2.0), 1.0)
    falls = [e.t for e in ev if e.level == 0]
    assert len(falls) == 7
    assert falls == pytest.approx([k / 7 for k in range(7)])


def test_mode2_short_bursts_pulse_shorter_than_burst():
    bursts = [CarrierBurst(k * 0.05, k * 0.05 + 0.02, 38e3, 2.0) for k in range(5)]
    ev = demodulate(SENSOR, bursts, 1.0)
    widths = [b - a for a, b in low_intervals(ev, 1.0)]
    assert len(widths) == 5
    assert all(0 < w < 0.02 for w in widths)


def test_mode3_sub_modulation_pulses_within_groups():
    # 833 Hz sub-bursts grouped at 7 Hz
    half = 1 / 833 / 2
    bursts = []
    for g in range(7):
        t0 = g / 7
        bursts += [CarrierBurst(t0 + 2 * k * half, t0 + (2 * k + 1) * half, 38e3, 2.0)
                   for k in range(10)]
    ev = demodulate(SENSOR, bursts, 1.0)
    assert sum(e.level == 0 for e in ev) == 70


def test_out_of_band_silent():
    assert demodulate(SENSOR, [CarrierBurst(0.0, 1.0, 10e3, 1e6)], 1.0) == []


def test_short_burst_rejected():
    too_short = 9 / 38e3
    assert demodulate(SENSOR, [CarrierBurst(0.0, too_short, 38e3, 2.0)], 1.0) == []
    assert len(demodulate(SENSOR, [CarrierBurst(0.0, 10 / 38e3, 38e3, 2.0)], 1.0)) == 2


def test_band_covers_32_to_40_khz_window():
    for f in (34e3, 38e3, 40e3, 42e3):
        assert SENSOR.in_band(f)
    assert not SENSOR.in_band(30e3)


def test_overlapping_bursts_rejected():
    with pytest.raises(InvalidStimulusError):
        demodulate(SENSOR, [CarrierBurst(0.0, 0.5, 38e3, 2.0),
                            CarrierBurst(0.4, 0.6, 38e3, 2.0)], 1.0)


@settings(max_examples=50)
@given(st.floats(0.5, 20.0))
def test_mode2_pulse_count_property(seconds):
    ev = demodulate(SENSOR, EmitterConfig().bursts(seconds, 5.0), seconds)
    n = sum(e.level == 0 for e in ev)
    assert abs(n - math.floor(7 * seconds)) <= 1


burst_lists = st.lists(
    st.tuples(st.floats(0, 0.2), st.floats(1e-4, 0.2), st.sampled_from([10e3, 36e3, 38e3]),
              st.floats(0, 3.0)),
    max_size=10)


def _layout(raw):
    t = 0.0
    out = []
    for gap, dur, f, irr in raw:
        t += gap
        out.append(CarrierBurst(t, t + dur, f, irr))
        t += dur
    return out


@settings(max_examples=100)
@given(burst_lists)
def test_events_alternate_and_increase(raw):
    bursts = _layout(raw)
    t_end = bursts[-1].t_end + 0.1 if bursts else 1.0
    ev = demodulate(SENSOR, bursts, t_end)
    assert all(a.t < b.t for a, b in zip(ev, ev[1:]))
    assert all(e.level == (k % 2) for k, e in enumerate(ev))
    # output is high whenever no qualifying carrier is present
    for a, b in low_intervals(ev, t_end):
        assert any(x.t_start <= a < x.t_end and SENSOR.in_band(x.carrier_hz)
                   and SENSOR.above_threshold(x.irradiance) for x in bursts)


@settings(max_examples=100)
@given(burst_lists)
def test_sub_threshold_silence(raw):
    bursts = [b._replace(irradiance=min(b.irradiance, 0.999999)) for b in _layout(raw)]
    assert demodulate(SENSOR, bursts, 5.0) == []


def test_sensor_event_shape():
    e = SensorEvent(0.1, 0)
    assert e.t == 0.1 and e.level == 0
