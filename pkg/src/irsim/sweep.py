"""One-parameter sweeps over a scenario: detection range and first alarm."""

from __future__ import annotations

from dataclasses import replace
from typing import NamedTuple, Optional, Sequence

from irsim.errors import ScenarioConfigError
from irsim.irlink import detection_range, self_reflection_range
from irsim.scenario import DeviceConfig, ScenarioConfig, run_scenario, summarize

SWEEP_PARAMS = ("r_s", "i_led", "min_spacing", "relative_speed", "reflectance")


class SweepRow(NamedTuple):
    value: float
    detection_range: float
    first_alarm: Optional[float]


def linspace(lo: float, hi: float, steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("a sweep needs at least 2 steps")
    if not lo < hi:
        raise ValueError("sweep range needs from < to")
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def _map_devices(cfg: ScenarioConfig, fn) -> ScenarioConfig:
    vehicles = tuple(v if v.device is None else replace(v, device=fn(v.device))
                     for v in cfg.vehicles)
    return replace(cfg, vehicles=vehicles)


def closing_speed(cfg: ScenarioConfig) -> float:
    """Initial rate at which the gap between the first two vehicles shrinks."""
    if len(cfg.vehicles) < 2:
        raise ScenarioConfigError("relative_speed needs a two-vehicle scenario", "vehicle")
    a, b = cfg.vehicles[:2]
    sign = 1.0 if b.initial_position >= a.initial_position else -1.0
    return (a.velocity(0.0) - b.velocity(0.0)) * sign


def apply_param(cfg: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    """Scenario with ``param`` set to ``value``.

    ``r_s`` and ``i_led`` change the LED drive but keep each emitter's
    calibration constant, so range follows the drive current. ``min_spacing``
    recalibrates every device.
    """
    if param == "r_s":
        return _map_devices(cfg, lambda d: replace(
            d, emitter=replace(d.emitter, drive=replace(d.emitter.drive, r_s=value))))
    if param == "i_led":
        return _map_devices(cfg, lambda d: replace(
            d, emitter=replace(d.emitter, drive=d.emitter.drive.with_current(value))))
    if param == "min_spacing":
        return _map_devices(cfg, lambda d: replace(d, min_spacing=value).calibrated())
    if param == "relative_speed":
        v_rel = closing_speed(cfg)
        if v_rel == 0:
            raise ScenarioConfigError("scenario has no closing speed to rescale",
                                      "vehicle.velocity")
        scale = value / v_rel
        vehicles = tuple(
            replace(v, velocity_profile=tuple((t, vel * scale) for t, vel in v.velocity_profile))
            for v in cfg.vehicles)
        return replace(cfg, vehicles=vehicles)
    if param == "reflectance":
        vehicles = tuple(replace(v, reflectance=value) for v in cfg.vehicles)
        return replace(cfg, vehicles=vehicles, enable_self_reflection=True)
    raise ValueError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")


def _reference_device(cfg: ScenarioConfig) -> DeviceConfig:
    for v in cfg.vehicles:
        if v.device is not None:
            return v.device
    raise ScenarioConfigError("sweep needs at least one equipped vehicle", "vehicle.equipped")


def sweep(cfg: ScenarioConfig, param: str, values: Sequence[float]) -> list[SweepRow]:
    """Rows in input order. For ``reflectance`` the range column is the
    obstacle distance that triggers a self-reflection alarm."""
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    rows = []
    for value in values:
        scen = apply_param(cfg, param, value)
        dev = _reference_device(scen)
        if param == "reflectance":
            rng = self_reflection_range(dev.front_sensor, dev.emitter, value)
        else:
            rng = detection_range(dev.front_sensor, dev.emitter)
        first = summarize(run_scenario(scen)).first_alarm
        rows.append(SweepRow(value, rng, first))
    return rows


def sweep_to_csv(param: str, rows: Sequence[SweepRow]) -> str:
    lines = [f"{param},detection_range,first_alarm"]
    for r in rows:
        first = "" if r.first_alarm is None else f"{r.first_alarm:.9g}"
        lines.append(f"{r.value:.9g},{r.detection_range:.9g},{first}")
    return "\n".join(lines) + "\n"
