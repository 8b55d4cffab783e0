"""Built-in self-check suite behind ``irsim verify``."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from irsim.alert import AudioOscillator, gate_audio
from irsim.io import trace_from_csv, trace_from_json, trace_to_csv, trace_to_json
from irsim.irlink import CarrierBurst, EmitterConfig, SensorModel, demodulate
from irsim.scenario import head_on, reflector, run_scenario, summarize
from irsim.timer555 import (
    LN2,
    LN3,
    AstableConfig,
    MonostableConfig,
    astable_timing,
    led_current,
    led_series_resistance,
    measure_steady_state,
    monostable_pulse_width,
    simulate_astable,
    simulate_monostable,
    solve_rb_for_frequency,
)

VERIFY_SEED = 555
DESIGN_RA = 2.2e3
DESIGN_C = 1.5e-9
DESIGN_RB = 11.53e3
REFLECTION_THRESHOLD = 0.4 * math.sqrt(0.3) / 2.0


@dataclass(frozen=True)
class CheckRow:
    name: str
    expected: str
    actual: str
    tolerance: str
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def table(self) -> str:
        headers = ("check", "expected", "actual", "tolerance", "result")
        cells = [(r.name, r.expected, r.actual, r.tolerance, "PASS" if r.passed else "FAIL")
                 for r in self.rows]
        widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(headers)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
        lines += [fmt.format(*c) for c in cells]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} "
                     f"({sum(r.passed for r in self.rows)}/{len(self.rows)})")
        return "\n".join(lines)


def random_astable(rng: random.Random) -> AstableConfig:
    return AstableConfig(r_a=10 ** rng.uniform(3, 6), r_b=10 ** rng.uniform(3, 6),
                         c=10 ** rng.uniform(-9, -5))


def random_monostable(rng: random.Random) -> MonostableConfig:
    return MonostableConfig(r_t=10 ** rng.uniform(3, 6), c_t=10 ** rng.uniform(-9, -4))


def astable_period_errors(cfg: AstableConfig) -> tuple[float, float]:
    """(relative error vs ln 2 closed form, relative error vs 1.44 frequency)."""
    exact = LN2 * (cfg.r_a + 2 * cfg.r_b) * cfg.c
    trace = simulate_astable(cfg, t_end=14 * exact)
    period = measure_steady_state(trace).period
    return abs(period - exact) / exact, abs(1 / period - astable_timing(cfg).frequency) / (
        astable_timing(cfg).frequency)


def monostable_width(cfg: MonostableConfig) -> float:
    trace = simulate_monostable(cfg, [(0.0, "fall"), (0.01 * cfg.tau, "rise")],
                                t_end=2 * cfg.tau)
    (start, end), = trace.intervals()
    return end - start


def reflection_boundary(tol: float = 1e-5) -> float:
    """Largest obstacle distance that still trips the self-reflection alarm."""
    def alarms(d: float) -> bool:
        return summarize(run_scenario(reflector(d, 0.3, t_end=0.5))).first_alarm is not None

    lo, hi = 0.05, 0.2
    if not alarms(lo) or alarms(hi):
        return math.nan
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if alarms(mid) else (lo, mid)
    return 0.5 * (lo + hi)


def _row(name: str, expected: float, actual: float, tol: float, unit: str = "",
         relative: bool = False) -> CheckRow:
    err = abs(actual - expected)
    if relative:
        err /= abs(expected)
        tol_s = f"{tol:.3g} rel"
    else:
        tol_s = f"{tol:.3g}{unit}"
    return CheckRow(name, f"{expected:.6g}{unit}", f"{actual:.6g}{unit}", tol_s, err <= tol)


def _flag(name: str, expected: str, actual: str, ok: bool) -> CheckRow:
    return CheckRow(name, expected, actual, "exact", ok)


def _checks() -> list[Callable[[], CheckRow]]:
    def rb_sizing():
        return _row("rb-sizing", 11.53e3, solve_rb_for_frequency(38e3, DESIGN_RA, DESIGN_C),
                    10.0, " ohm")

    def rs_min():
        return _row("rs-min", 11.2, led_series_resistance(9.0, 1.7, 2, 0.5), 0.0, " ohm")

    def led_220():
        return _row("led-current-220", 25.45e-3, led_current(9.0, 1.7, 2, 220.0), 0.01e-3, " A")

    def astable_design():
        cfg = AstableConfig(DESIGN_RA, DESIGN_RB, DESIGN_C)
        f = measure_steady_state(simulate_astable(cfg, t_end=1e-3)).frequency
        return _row("astable-design-freq", 38e3, f, 0.005, relative=True)

    def astable_random():
        rng = random.Random(VERIFY_SEED)
        errs = [astable_period_errors(random_astable(rng)) for _ in range(50)]
        exact = max(e[0] for e in errs)
        coarse = max(e[1] for e in errs)
        ok = exact <= 1e-9 and coarse <= 2e-3
        return CheckRow("astable-random-50", "ln2 exact / 1.44 form 0.2%",
                        f"{exact:.2e} / {coarse:.3%}", "1e-9 rel / 0.2%", ok)

    def mono_random():
        rng = random.Random(VERIFY_SEED + 1)
        exact, coarse = 0.0, 0.0
        for _ in range(50):
            cfg = random_monostable(rng)
            w = monostable_width(cfg)
            exact = max(exact, abs(w - cfg.tau * LN3) / (cfg.tau * LN3))
            coarse = max(coarse, abs(w - monostable_pulse_width(cfg)) / monostable_pulse_width(cfg))
        ok = exact <= 1e-9 and coarse <= 2e-3
        return CheckRow("monostable-random-50", "RC ln3 exact / 1.1 RC 0.2%",
                        f"{exact:.2e} / {coarse:.3%}", "1e-9 rel / 0.2%", ok)

    def mono_retrigger():
        cfg = MonostableConfig(91e3, 10e-6)
        one = simulate_monostable(cfg, [(0.0, "fall"), (0.01, "rise")], t_end=3.0)
        two = simulate_monostable(cfg, [(0.0, "fall"), (0.01, "rise"), (0.5, "fall"),
                                        (0.51, "rise")], t_end=3.0)
        return _flag("monostable-nonretrigger", "identical traces",
                     "identical" if one.events == two.events else "differ",
                     one.events == two.events)

    def sensor_modes():
        s = SensorModel()
        mode1 = len(demodulate(s, [CarrierBurst(0.0, 1.0, 38e3, 2.0)], 1.0)) // 2
        mode2 = sum(1 for e in demodulate(s, EmitterConfig().bursts(1.0, 2.0), 1.0)
                    if e.level == 0)
        oob = len(demodulate(s, [CarrierBurst(0.0, 1.0, 10e3, 100.0)], 1.0))
        ok = mode1 == 1 and abs(mode2 - 7) <= 1 and oob == 0
        return CheckRow("sensor-modes", "1 / 7+-1 / 0", f"{mode1} / {mode2} / {oob}",
                        "counts", ok)

    def gate():
        ok = all(
            (g := gate_audio(q1, q2)).audio_enabled == (q1 or q2) and g.q3_on == (not (q1 or q2))
            for q1 in (False, True) for q2 in (False, True))
        return _flag("gate-truth-table", "audio = q1 or q2", "ok" if ok else "mismatch", ok)

    def tone():
        return _row("audio-tone", 250.0, AudioOscillator().frequency, 0.02, relative=True)

    def boundary():
        inside = summarize(run_scenario(head_on(0.39, 0.0, t_end=3.0)))
        outside = summarize(run_scenario(head_on(0.41, 0.0, t_end=3.0)))
        full = all(v.alarm_duration >= 3.0 for v in inside.vehicles)
        never = outside.first_alarm is None
        return _flag("range-boundary", "on@0.39 off@0.41",
                     f"{'on' if full else 'gaps'}@0.39 {'off' if never else 'on'}@0.41",
                     full and never)

    def closing():
        s = summarize(run_scenario(head_on(1.0, 0.1)))
        first = s.first_alarm if s.first_alarm is not None else math.inf
        return _row("closing-first-alarm", 6.0, first, 0.01, " s")

    def reflection():
        return _row("reflection-threshold", REFLECTION_THRESHOLD, reflection_boundary(),
                    1e-3, " m")

    def determinism():
        cfg = head_on(1.0, 0.1)
        a, b = run_scenario(cfg), run_scenario(cfg)
        ok = a == b and trace_from_csv(trace_to_csv(a)) == a and trace_from_json(
            trace_to_json(a)) == a
        return _flag("determinism-roundtrip", "bit-identical", "ok" if ok else "mismatch", ok)

    return [rb_sizing, rs_min, led_220, astable_design, astable_random, mono_random,
            mono_retrigger, sensor_modes, gate, tone, boundary, closing, reflection,
            determinism]


def run_checks() -> VerifyReport:
    rows = []
    for check in _checks():
        try:
            rows.append(check())
        except Exception as exc:  # a crashing check is a failing row
            rows.append(CheckRow(check.__name__, "-", f"error: {exc}", "-", False))
    return VerifyReport(tuple(rows))
