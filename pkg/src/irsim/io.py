"""Scenario files in, trace files out.

A scenario file is TOML (or JSON with the same structure)::

    t_end = 9.0
    sample_dt = "10ms"

    [device]                 # shared by every equipped vehicle
    min_spacing = 0.4

    [device.emitter]
    r_s = 220                # radiance_coeff omitted: calibrate to min_spacing

    [[vehicle]]
    id = "A"
    position = 0.0
    velocity = 0.05
    facing = 1

    [[vehicle]]
    id = "B"
    position = 1.0
    velocity = -0.05
    facing = -1
    [vehicle.device.emitter] # per-vehicle override
    r_s = 220

Numbers may be written with SI suffixes as strings (``"11.53k"``, ``"1.5nF"``).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from irsim.alert import DEFAULT_ONE_SHOT, AudioOscillator
from irsim.errors import InvalidConfigError, ScenarioConfigError
from irsim.irlink import EmitterConfig, LedDrive, SensorModel
from irsim.scenario import (
    DeviceConfig,
    ScenarioConfig,
    TraceRow,
    VehicleSample,
    VehicleSpec,
)
from irsim.timer555 import AstableConfig, MonostableConfig, SupplyRail
from irsim.units import parse_quantity

VEHICLE_COLUMNS = ("pos", "dist_nearest", "front_rx", "rear_rx", "front_led", "rear_led",
                   "audio")
FLOAT_COLUMNS = ("pos", "dist_nearest")

_EMITTER_KEYS = {"carrier_hz", "envelope_hz", "envelope_duty", "vcc", "v_led", "n_series",
                 "r_s", "i_led", "radiance_coeff"}
_SENSOR_KEYS = {"center_hz", "band_halfwidth_hz", "sensitivity", "min_burst_cycles",
                "blind_after", "output_low_width"}
_ONE_SHOT_KEYS = {"r_t", "c_t", "vcc"}
_AUDIO_KEYS = {"r_a", "r_b", "c", "vcc", "nominal_hz"}
_DEVICE_SECTIONS = {"emitter", "sensor", "front_sensor", "rear_sensor", "one_shot", "audio"}
_DEVICE_KEYS = _DEVICE_SECTIONS | {"min_spacing"}
_VEHICLE_KEYS = {"id", "position", "velocity", "velocity_profile", "facing", "equipped",
                 "reflectance", "device"}
_TOP_KEYS = {"t_end", "sample_dt", "enable_self_reflection", "device", "vehicle"}


# ---------------------------------------------------------------------------
# Scenario loading
# ---------------------------------------------------------------------------


def _check_keys(table: Any, allowed: set, where: str) -> dict:
    if not isinstance(table, dict):
        raise ScenarioConfigError(f"{where} must be a table", where)
    for key in table:
        if key not in allowed:
            name = f"{where}.{key}" if where else key
            raise ScenarioConfigError(f"unknown field {name!r}", name)
    return table


def _num(table: dict, key: str, where: str, default=None) -> float:
    name = f"{where}.{key}" if where else key
    if key not in table:
        if default is None:
            raise ScenarioConfigError(f"missing field {name!r}", name)
        return default
    try:
        return parse_quantity(table[key])
    except ValueError as exc:
        raise ScenarioConfigError(f"field {name!r}: {exc}", name) from None


def _merge(base: dict, override: dict) -> dict:
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **v}
        else:
            out[k] = v
    return out


def _build(where: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except InvalidConfigError as exc:
        raise ScenarioConfigError(f"{where}: {exc}", where) from None


def _emitter(table: dict, where: str) -> tuple[EmitterConfig, bool]:
    _check_keys(table, _EMITTER_KEYS, where)
    d = EmitterConfig()
    drive = _build(where, LedDrive,
                   vcc=_num(table, "vcc", where, d.drive.vcc),
                   v_led=_num(table, "v_led", where, d.drive.v_led),
                   n_series=int(_num(table, "n_series", where, d.drive.n_series)),
                   r_s=_num(table, "r_s", where, d.drive.r_s))
    if "i_led" in table:
        if "r_s" in table:
            raise ScenarioConfigError(f"{where}: give r_s or i_led, not both", f"{where}.i_led")
        drive = _build(where, drive.with_current, i_led=_num(table, "i_led", where))
    has_k = "radiance_coeff" in table
    emitter = _build(where, EmitterConfig,
                     carrier_hz=_num(table, "carrier_hz", where, d.carrier_hz),
                     envelope_hz=_num(table, "envelope_hz", where, d.envelope_hz),
                     envelope_duty=_num(table, "envelope_duty", where, d.envelope_duty),
                     drive=drive,
                     radiance_coeff=_num(table, "radiance_coeff", where, d.radiance_coeff))
    return emitter, has_k


def _sensor(table: dict, where: str) -> SensorModel:
    _check_keys(table, _SENSOR_KEYS, where)
    d = SensorModel()
    kwargs = {k: _num(table, k, where, getattr(d, k)) for k in _SENSOR_KEYS}
    kwargs["min_burst_cycles"] = int(kwargs["min_burst_cycles"])
    return _build(where, SensorModel, **kwargs)


def _device(table: dict, where: str) -> DeviceConfig:
    _check_keys(table, _DEVICE_KEYS, where)
    emitter, has_k = _emitter(table.get("emitter", {}), f"{where}.emitter")
    shared = table.get("sensor", {})
    front = _sensor(_merge(shared, table.get("front_sensor", {})), f"{where}.front_sensor")
    rear = _sensor(_merge(shared, table.get("rear_sensor", {})), f"{where}.rear_sensor")

    os_t = _check_keys(table.get("one_shot", {}), _ONE_SHOT_KEYS, f"{where}.one_shot")
    w = f"{where}.one_shot"
    one_shot = _build(w, MonostableConfig,
                      r_t=_num(os_t, "r_t", w, DEFAULT_ONE_SHOT.r_t),
                      c_t=_num(os_t, "c_t", w, DEFAULT_ONE_SHOT.c_t),
                      supply=_build(w, SupplyRail, vcc=_num(os_t, "vcc", w, 9.0)))

    au_t = _check_keys(table.get("audio", {}), _AUDIO_KEYS, f"{where}.audio")
    w = f"{where}.audio"
    d = AudioOscillator()
    cfg = _build(w, AstableConfig,
                 r_a=_num(au_t, "r_a", w, d.cfg.r_a),
                 r_b=_num(au_t, "r_b", w, d.cfg.r_b),
                 c=_num(au_t, "c", w, d.cfg.c),
                 supply=_build(w, SupplyRail, vcc=_num(au_t, "vcc", w, 9.0)))
    audio = _build(w, AudioOscillator, cfg=cfg,
                   nominal_hz=_num(au_t, "nominal_hz", w, d.nominal_hz))

    spacing = _num(table, "min_spacing", where, 0.4)
    if not spacing > 0:
        raise ScenarioConfigError("min_spacing must be positive", f"{where}.min_spacing")
    device = DeviceConfig(emitter=emitter, front_sensor=front, rear_sensor=rear,
                          one_shot=one_shot, audio=audio, min_spacing=spacing)
    return device if has_k else device.calibrated()


def _vehicle(table: dict, index: int, shared_device: dict) -> VehicleSpec:
    where = f"vehicle[{index}]"
    _check_keys(table, _VEHICLE_KEYS, where)
    vid = str(table.get("id", f"v{index}"))
    if "velocity" in table and "velocity_profile" in table:
        raise ScenarioConfigError(f"{where}: give velocity or velocity_profile, not both",
                                  f"{where}.velocity_profile")
    if "velocity_profile" in table:
        prof = table["velocity_profile"]
        if not isinstance(prof, list) or not all(
                isinstance(p, list) and len(p) == 2 for p in prof):
            raise ScenarioConfigError(f"{where}.velocity_profile must be a list of [t, v] pairs",
                                      f"{where}.velocity_profile")
        try:
            profile = tuple((parse_quantity(t), parse_quantity(v)) for t, v in prof)
        except ValueError as exc:
            raise ScenarioConfigError(f"{where}.velocity_profile: {exc}",
                                      f"{where}.velocity_profile") from None
    else:
        profile = ((0.0, _num(table, "velocity", where, 0.0)),)
    equipped = table.get("equipped", True)
    if not isinstance(equipped, bool):
        raise ScenarioConfigError(f"{where}.equipped must be true or false", f"{where}.equipped")
    device = None
    if equipped:
        device = _device(_merge(shared_device, table.get("device", {})), f"{where}.device")
    elif "device" in table:
        raise ScenarioConfigError(f"{where}: unequipped vehicle cannot have a device",
                                  f"{where}.device")
    facing = table.get("facing", 1)
    if facing not in (1, -1) or isinstance(facing, bool):
        raise ScenarioConfigError(f"{where}.facing must be 1 or -1", f"{where}.facing")
    return VehicleSpec(
        id=vid,
        initial_position=_num(table, "position", where, 0.0),
        velocity_profile=profile,
        device=device,
        reflectance=_num(table, "reflectance", where, 0.0),
        facing=int(facing),
    )


def scenario_from_dict(data: dict) -> ScenarioConfig:
    _check_keys(data, _TOP_KEYS, "")
    shared = _check_keys(data.get("device", {}), _DEVICE_KEYS, "device")
    vehicles = data.get("vehicle")
    if not isinstance(vehicles, list) or not vehicles:
        raise ScenarioConfigError("at least one [[vehicle]] section is required", "vehicle")
    specs = tuple(_vehicle(v, i, shared) for i, v in enumerate(vehicles))
    reflect = data.get("enable_self_reflection", False)
    if not isinstance(reflect, bool):
        raise ScenarioConfigError("enable_self_reflection must be true or false",
                                  "enable_self_reflection")
    return ScenarioConfig(
        vehicles=specs,
        t_end=_num(data, "t_end", ""),
        sample_dt=_num(data, "sample_dt", "", 10e-3),
        enable_self_reflection=reflect,
    )


def parse_scenario(text: str, fmt: Optional[str] = None) -> ScenarioConfig:
    """Parse scenario text; ``fmt`` is ``"toml"``, ``"json"`` or None to sniff."""
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    try:
        data = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioConfigError(f"JSON parse error at line {exc.lineno}, "
                                  f"column {exc.colno}: {exc.msg}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioConfigError(f"parse error: {exc}") from None
    return scenario_from_dict(data)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, "json" if path.suffix.lower() == ".json" else None)


# ---------------------------------------------------------------------------
# Trace files
# ---------------------------------------------------------------------------


def trace_columns(n_vehicles: int) -> list[str]:
    return ["t"] + [f"v{i}_{c}" for i in range(n_vehicles) for c in VEHICLE_COLUMNS]


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.9g}"


def _row_values(row: TraceRow) -> list:
    out: list = [row.t]
    for s in row.vehicles:
        out += [s.pos, s.dist_nearest, int(s.front_rx), int(s.rear_rx), int(s.front_led),
                int(s.rear_led), int(s.audio)]
    return out


def trace_to_csv(trace: Sequence[TraceRow]) -> str:
    n = len(trace[0].vehicles) if trace else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trace_columns(n))
    for row in trace:
        vals = _row_values(row)
        w.writerow([v if isinstance(v, int) else _fmt(v) for v in vals])
    return buf.getvalue()


def trace_to_json(trace: Sequence[TraceRow], summary: Optional[dict] = None) -> str:
    n = len(trace[0].vehicles) if trace else 0
    doc = {
        "columns": trace_columns(n),
        "rows": [_row_values(r) for r in trace],
    }
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=1) + "\n"


def _rows_from_values(columns: Sequence[str], rows: Iterable[Sequence]) -> list[TraceRow]:
    if not columns or columns[0] != "t" or (len(columns) - 1) % len(VEHICLE_COLUMNS):
        raise ValueError("not an irsim trace header")
    n = (len(columns) - 1) // len(VEHICLE_COLUMNS)
    if list(columns) != trace_columns(n):
        raise ValueError("trace columns out of order")
    out = []
    for vals in rows:
        if len(vals) != len(columns):
            raise ValueError(f"row has {len(vals)} fields, expected {len(columns)}")
        samples = []
        for i in range(n):
            base = 1 + i * len(VEHICLE_COLUMNS)
            pos, dist, *flags = vals[base:base + len(VEHICLE_COLUMNS)]
            samples.append(VehicleSample(pos, dist, *(bool(f) for f in flags)))
        out.append(TraceRow(t=vals[0], vehicles=tuple(samples)))
    return out


def trace_from_csv(text: str) -> list[TraceRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    n = (len(header) - 1) // len(VEHICLE_COLUMNS)
    float_idx = {0} | {1 + i * len(VEHICLE_COLUMNS) + k for i in range(n) for k in (0, 1)}

    def conv(j: int, s: str):
        if j in float_idx:
            return None if s == "" else float(s)
        return int(s)

    return _rows_from_values(header, ([conv(j, s) for j, s in enumerate(r)] for r in reader))


def trace_from_json(text: str) -> list[TraceRow]:
    doc = json.loads(text)
    return _rows_from_values(doc["columns"], doc["rows"])


def write_trace(trace: Sequence[TraceRow], path, fmt: str = "csv",
                summary: Optional[dict] = None) -> None:
    text = trace_to_csv(trace) if fmt == "csv" else trace_to_json(trace, summary)
    Path(path).write_text(text, encoding="utf-8")


def read_trace(path) -> list[TraceRow]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return trace_from_json(text)
    return trace_from_csv(text)
