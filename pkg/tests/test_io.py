import json

import pytest

from irsim.errors import ScenarioConfigError
from irsim.io import (
    load_scenario,
    parse_scenario,
    read_trace,
    trace_columns,
    trace_from_csv,
    trace_from_json,
    trace_to_csv,
    trace_to_json,
    write_trace,
)
from irsim.scenario import head_on, reflector, run_scenario

MINIMAL = """
t_end = 2
[[vehicle]]
id = "A"
position = 0
velocity = 0.1
[[vehicle]]
id = "B"
position = "1.0"
velocity = -0.1
facing = -1
"""


@pytest.fixture(scope="module")
def trace():
    return run_scenario(head_on(1.0, 0.1))


def test_columns():
    assert trace_columns(1) == ["t", "v0_pos", "v0_dist_nearest", "v0_front_rx", "v0_rear_rx",
                                "v0_front_led", "v0_rear_led", "v0_audio"]
    assert len(trace_columns(3)) == 22


def test_csv_roundtrip_exact(trace):
    text = trace_to_csv(trace)
    assert text.splitlines()[0] == ",".join(trace_columns(2))
    assert trace_from_csv(text) == trace
    assert trace_to_csv(trace_from_csv(text)) == text


def test_json_roundtrip_exact(trace):
    text = trace_to_json(trace, {"x": 1})
    assert trace_from_json(text) == trace
    assert json.loads(text)["summary"] == {"x": 1}


def test_none_distance_roundtrip():
    trace = run_scenario(reflector(0.1, t_end=0.2))
    assert trace_from_csv(trace_to_csv(trace)) == trace
    assert trace_from_json(trace_to_json(trace)) == trace


def test_write_and_read(tmp_path, trace):
    for fmt in ("csv", "json"):
        p = tmp_path / f"t.{fmt}"
        write_trace(trace, p, fmt)
        assert read_trace(p) == trace


def test_bad_trace_header():
    with pytest.raises(ValueError):
        trace_from_csv("time,x\n0,1\n")
    cols = trace_columns(1)
    cols[1], cols[2] = cols[2], cols[1]
    with pytest.raises(ValueError):
        trace_from_csv(",".join(cols) + "\n")


def test_minimal_scenario_defaults():
    cfg = parse_scenario(MINIMAL)
    assert cfg.t_end == 2.0
    assert cfg.sample_dt == pytest.approx(0.01)
    assert [v.id for v in cfg.vehicles] == ["A", "B"]
    assert cfg.vehicles[1].facing == -1
    assert cfg.vehicles[0].device.range == pytest.approx(0.4)


def test_bundled_closing_matches_builder(bundled):
    cfg = load_scenario(bundled("closing.scenario"))
    assert run_scenario(cfg) == run_scenario(head_on(1.0, 0.1, t_end=9.0))


def test_json_input_equivalent():
    doc = {"t_end": 2, "vehicle": [
        {"id": "A", "position": 0, "velocity": 0.1},
        {"id": "B", "position": "1.0", "velocity": -0.1, "facing": -1}]}
    assert parse_scenario(json.dumps(doc)) == parse_scenario(MINIMAL)


def test_unit_suffixes():
    text = MINIMAL.replace("t_end = 2", 't_end = 2\nsample_dt = "5ms"\n'
                           '[device.emitter]\nr_s = "0.22k"\n[device.one_shot]\n'
                           'r_t = "91kohm"\nc_t = "10uF"')
    cfg = parse_scenario(text)
    dev = cfg.vehicles[0].device
    assert cfg.sample_dt == 5e-3
    assert dev.emitter.drive.r_s == 220.0
    assert dev.one_shot.r_t == 91e3 and dev.one_shot.c_t == 10e-6


def test_explicit_radiance_coeff_skips_calibration():
    text = MINIMAL.replace("t_end = 2", "t_end = 2\n[device.emitter]\nradiance_coeff = 1.0")
    dev = parse_scenario(text).vehicles[0].device
    assert dev.emitter.radiance_coeff == 1.0


def test_vehicle_device_override():
    text = MINIMAL + '[vehicle.device.emitter]\ni_led = "0.1"\n'
    cfg = parse_scenario(text)
    assert cfg.vehicles[1].device.emitter.drive.current == pytest.approx(0.1)
    assert cfg.vehicles[0].device.emitter.drive.r_s == 220.0


@pytest.mark.parametrize("text, field", [
    (MINIMAL + "bogus = 1\n", "vehicle[1].bogus"),
    (MINIMAL.replace("t_end = 2", "t_end = 2\nspeed = 3"), "speed"),
    (MINIMAL.replace("t_end = 2", ""), "t_end"),
    (MINIMAL.replace('position = "1.0"', 'position = "fast"'), "vehicle[1].position"),
    (MINIMAL.replace("facing = -1", "facing = 0"), "vehicle[1].facing"),
    (MINIMAL.replace("t_end = 2", "t_end = 2\n[device.emitter]\nr_s = 1\ni_led = 0.1"),
     "vehicle[0].device.emitter.i_led"),
    (MINIMAL.replace("t_end = 2", "t_end = 2\n[device.sensor]\nq = 1"), "vehicle[0].device.front_sensor.q"),
    ("t_end = 1\n", "vehicle"),
])
def test_errors_name_field(text, field):
    with pytest.raises(ScenarioConfigError) as info:
        parse_scenario(text)
    assert info.value.field == field
    assert field.split(".")[-1].split("[")[0] in str(info.value)


def test_malformed_toml():
    with pytest.raises(ScenarioConfigError, match="parse error"):
        parse_scenario("t_end = = 3")


def test_malformed_json():
    with pytest.raises(ScenarioConfigError, match="JSON"):
        parse_scenario("{not json")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioConfigError, match="cannot read"):
        load_scenario(tmp_path / "nope.scenario")
