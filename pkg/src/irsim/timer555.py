"""555 timer models: design formulas and exact event-driven simulation.

The simulators never step an ODE. Every comparator crossing is solved from
the RC charge law ``v(t) = v_inf + (v0 - v_inf) * exp(-t / tau)``, so event
times carry only floating-point round-off.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

from irsim.errors import (
    InfeasibleTargetError,
    InsufficientHeadroomError,
    InvalidConfigError,
    InvalidStimulusError,
)

LN2 = math.log(2.0)
LN3 = math.log(3.0)

# Handbook coefficients used by the design equations.
MONOSTABLE_COEFF = 1.1
ASTABLE_COEFF = 0.693
FREQUENCY_COEFF = 1.44


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise InvalidConfigError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class SupplyRail:
    vcc: float = 9.0

    def __post_init__(self):
        _require_positive(vcc=self.vcc)

    @property
    def lower_threshold(self) -> float:
        """Trigger comparator level, vcc/3."""
        return self.vcc / 3.0

    @property
    def upper_threshold(self) -> float:
        """Threshold comparator level, 2*vcc/3."""
        return 2.0 * self.vcc / 3.0


@dataclass(frozen=True)
class MonostableConfig:
    r_t: float
    c_t: float
    supply: SupplyRail = SupplyRail()

    def __post_init__(self):
        _require_positive(r_t=self.r_t, c_t=self.c_t)

    @property
    def tau(self) -> float:
        return self.r_t * self.c_t


@dataclass(frozen=True)
class AstableConfig:
    r_a: float
    r_b: float
    c: float
    supply: SupplyRail = SupplyRail()

    def __post_init__(self):
        _require_positive(r_a=self.r_a, r_b=self.r_b, c=self.c)

    @property
    def tau_charge(self) -> float:
        return (self.r_a + self.r_b) * self.c

    @property
    def tau_discharge(self) -> float:
        return self.r_b * self.c


@dataclass(frozen=True)
class TimingSummary:
    t_high: float
    t_low: float
    period: float
    frequency: float
    duty: float


# ---------------------------------------------------------------------------
# Design formulas
# ---------------------------------------------------------------------------


def monostable_pulse_width(cfg: MonostableConfig) -> float:
    """Nominal one-shot width, 1.1 * R_T * C_T."""
    _require_positive(r_t=cfg.r_t, c_t=cfg.c_t)
    return MONOSTABLE_COEFF * cfg.r_t * cfg.c_t


def astable_timing(cfg: AstableConfig) -> TimingSummary:
    """Handbook astable timing using the 0.693 and 1.44 coefficients.

    ``duty`` is the discharge (output low) fraction R_B / (R_A + 2 R_B).
    ``period`` is ``t_high + t_low``. ``frequency`` uses the 1.44 form, so it
    sits about 0.2% below ``1/period`` (1.44 versus 1/0.693 = 1.443).
    """
    _require_positive(r_a=cfg.r_a, r_b=cfg.r_b, c=cfg.c)
    t_high = ASTABLE_COEFF * (cfg.r_a + cfg.r_b) * cfg.c
    t_low = ASTABLE_COEFF * cfg.r_b * cfg.c
    return TimingSummary(
        t_high=t_high,
        t_low=t_low,
        period=t_high + t_low,
        frequency=FREQUENCY_COEFF / ((cfg.r_a + 2.0 * cfg.r_b) * cfg.c),
        duty=cfg.r_b / (cfg.r_a + 2.0 * cfg.r_b),
    )


def exact_astable_timing(cfg: AstableConfig) -> TimingSummary:
    """Astable timing with the exact ln 2 coefficient (ideal comparators)."""
    t_high = LN2 * cfg.tau_charge
    t_low = LN2 * cfg.tau_discharge
    period = t_high + t_low
    return TimingSummary(t_high, t_low, period, 1.0 / period, t_low / period)


def solve_rb_for_frequency(f_target: float, r_a: float, c: float) -> float:
    """R_B that puts an astable at ``f_target`` given R_A and C."""
    _require_positive(f_target=f_target, r_a=r_a, c=c)
    r_b = (FREQUENCY_COEFF / (f_target * c) - r_a) / 2.0
    if r_b <= 0:
        raise InfeasibleTargetError(
            f"{f_target} Hz needs R_A + 2 R_B = {FREQUENCY_COEFF / (f_target * c):.6g} ohm, "
            f"which is below R_A = {r_a:.6g} ohm"
        )
    return r_b


def led_series_resistance(vcc: float, v_led: float, n_series: int, i_led: float) -> float:
    _require_positive(i_led=i_led)
    headroom = vcc - n_series * v_led
    if headroom <= 0:
        raise InsufficientHeadroomError(
            f"vcc={vcc} V does not exceed {n_series} x {v_led} V of LED drop"
        )
    return headroom / i_led


def led_current(vcc: float, v_led: float, n_series: int, r_s: float) -> float:
    """Forward current of a series LED string; zero when the string is off."""
    _require_positive(r_s=r_s)
    return max(0.0, (vcc - n_series * v_led) / r_s)


def crossing_time(v0: float, v_inf: float, v_x: float, tau: float) -> float:
    """Time for an RC node starting at ``v0`` and heading to ``v_inf`` to reach ``v_x``.

    Returns ``math.inf`` when ``v_x`` is not between ``v0`` and ``v_inf``.
    """
    if v0 == v_x:
        return 0.0
    num = v0 - v_inf
    den = v_x - v_inf
    if den == 0 or (num > 0) != (den > 0) or abs(den) > abs(num):
        return math.inf
    return tau * math.log(num / den)


# ---------------------------------------------------------------------------
# Event-driven simulation
# ---------------------------------------------------------------------------


class Phase(str, Enum):
    IDLE = "idle"
    TIMING = "timing"
    CHARGING = "charging"
    DISCHARGING = "discharging"


@dataclass(frozen=True)
class Timer555State:
    v_cap: float
    output: bool
    discharge_on: bool
    phase: Phase
    t_ref: float
    reset_asserted: bool = False


@dataclass(frozen=True)
class Transition:
    t: float
    signal: str
    value: bool


@dataclass(frozen=True)
class ChargeSegment:
    """Capacitor voltage on ``[t0, next segment)``: v0 relaxing to v_inf."""

    t0: float
    v0: float
    v_inf: float
    tau: float

    def voltage(self, t: float) -> float:
        if self.tau == 0 or self.v0 == self.v_inf:
            return self.v0
        return self.v_inf + (self.v0 - self.v_inf) * math.exp(-(t - self.t0) / self.tau)


@dataclass
class EventTrace:
    """Ordered signal transitions of one timer plus its capacitor history.

    Signals are ``"output"`` (True = high) and ``"discharge"`` (True = switch
    on). Both are recorded at t = 0 with their initial values.
    """

    t_end: float
    vcc: float
    events: list[Transition] = field(default_factory=list)
    segments: list[ChargeSegment] = field(default_factory=list)
    final_state: Optional[Timer555State] = None

    def record(self, t: float, signal: str, value: bool) -> None:
        self.events.append(Transition(t, signal, value))

    def transitions(self, signal: str) -> list[Transition]:
        return [e for e in self.events if e.signal == signal]

    def level(self, signal: str, t: float) -> bool:
        """Signal value in effect at ``t`` (after every event stamped <= t)."""
        value = None
        for e in self.events:
            if e.t > t:
                break
            if e.signal == signal:
                value = e.value
        if value is None:
            raise KeyError(signal)
        return value

    def intervals(self, signal: str = "output") -> list[tuple[float, float]]:
        """Half-open intervals on which ``signal`` is True, clipped to t_end."""
        out: list[tuple[float, float]] = []
        start = None
        for e in self.transitions(signal):
            if e.value and start is None:
                start = e.t
            elif not e.value and start is not None:
                if e.t > start:
                    out.append((start, e.t))
                start = None
        if start is not None and self.t_end > start:
            out.append((start, self.t_end))
        merged: list[tuple[float, float]] = []
        for a, b in out:
            if merged and merged[-1][1] == a:
                merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        return merged

    def v_cap(self, t: float) -> float:
        starts = [s.t0 for s in self.segments]
        i = bisect.bisect_right(starts, t) - 1
        if i < 0:
            raise ValueError(f"t={t} precedes the trace")
        return self.segments[i].voltage(t)

    def samples(self, dt: float) -> list[tuple[float, float]]:
        _require_positive(dt=dt)
        n = int(math.floor(self.t_end / dt + 1e-9))
        return [(k * dt, self.v_cap(k * dt)) for k in range(n + 1)]


def _check_sorted(times: Sequence[float], what: str, t_end: float) -> None:
    prev = -math.inf
    for t in times:
        if not math.isfinite(t) or t < 0 or t > t_end:
            raise InvalidStimulusError(f"{what} time {t!r} outside [0, {t_end}]")
        if t < prev:
            raise InvalidStimulusError(f"{what} events are not sorted ({t} after {prev})")
        prev = t


def _parse_edge(edge) -> bool:
    """Return True when the trigger pin is pulled low (asserted)."""
    if isinstance(edge, bool):
        return edge
    key = str(edge).lower()
    if key in ("fall", "falling", "low", "0"):
        return True
    if key in ("rise", "rising", "high", "1"):
        return False
    raise InvalidStimulusError(f"unknown trigger edge {edge!r}")


class _Recorder:
    """Tracks the live Timer555State and mirrors changes into an EventTrace."""

    def __init__(self, trace: EventTrace, state: Timer555State, tau0: float):
        self.trace = trace
        self.state = state
        trace.record(0.0, "output", state.output)
        trace.record(0.0, "discharge", state.discharge_on)
        trace.segments.append(ChargeSegment(0.0, state.v_cap, state.v_cap, tau0))

    def set(self, t: float, *, output: bool, phase: Phase, v0: float, v_inf: float,
            tau: float, reset: Optional[bool] = None) -> None:
        s = self.state
        if output != s.output:
            self.trace.record(t, "output", output)
        discharge = not output
        if discharge != s.discharge_on:
            self.trace.record(t, "discharge", discharge)
        self.state = replace(
            s, v_cap=v0, output=output, discharge_on=discharge, phase=phase, t_ref=t,
            reset_asserted=s.reset_asserted if reset is None else reset,
        )
        seg = ChargeSegment(t, v0, v_inf, tau)
        if self.trace.segments and self.trace.segments[-1].t0 == t:
            self.trace.segments[-1] = seg
        else:
            self.trace.segments.append(seg)

    def v_now(self, t: float) -> float:
        return self.trace.segments[-1].voltage(t)


def simulate_monostable(
    cfg: MonostableConfig,
    triggers: Iterable[tuple[float, object]] = (),
    resets: Iterable[tuple[float, bool]] = (),
    t_end: float = 1.0,
) -> EventTrace:
    """Non-retriggerable 555 one-shot.

    ``triggers`` are ``(t, edge)`` pairs on the active-low trigger pin:
    ``"fall"`` pulls it below vcc/3, ``"rise"`` releases it. ``resets`` are
    ``(t, asserted)`` levels on the reset pin. Reset dominates: while it is
    asserted the output is low and the capacitor is held at 0 V. A trigger
    still held low when a pulse ends (or when reset releases) starts a new
    pulse at that instant.
    """
    _require_positive(t_end=t_end)
    triggers = [(float(t), _parse_edge(e)) for t, e in triggers]
    resets = [(float(t), bool(lvl)) for t, lvl in resets]
    _check_sorted([t for t, _ in triggers], "trigger", t_end)
    _check_sorted([t for t, _ in resets], "reset", t_end)

    vcc = cfg.supply.vcc
    tau = cfg.tau
    width = crossing_time(0.0, vcc, cfg.supply.upper_threshold, tau)
    trace = EventTrace(t_end=t_end, vcc=vcc)
    rec = _Recorder(trace, Timer555State(0.0, False, True, Phase.IDLE, 0.0), tau)

    # Resets sort ahead of triggers at the same instant.
    stimuli = sorted(
        [(t, 0, i, v) for i, (t, v) in enumerate(resets)]
        + [(t, 1, i, v) for i, (t, v) in enumerate(triggers)],
        key=lambda s: (s[0], s[1], s[2]),
    )
    trigger_low = False
    reset_on = False

    def start_pulse(t: float) -> None:
        rec.set(t, output=True, phase=Phase.TIMING, v0=0.0, v_inf=vcc, tau=tau)

    def end_pulse(t: float) -> None:
        rec.set(t, output=False, phase=Phase.IDLE, v0=0.0, v_inf=0.0, tau=tau)
        if trigger_low and not reset_on:
            start_pulse(t)

    for t, kind, _, value in stimuli:
        while rec.state.phase is Phase.TIMING and rec.state.t_ref + width <= t:
            end_pulse(rec.state.t_ref + width)
        if kind == 0:
            reset_on = value
            if reset_on:
                rec.set(t, output=False, phase=Phase.IDLE, v0=0.0, v_inf=0.0, tau=tau,
                        reset=True)
            else:
                rec.state = replace(rec.state, reset_asserted=False)
                if trigger_low and rec.state.phase is Phase.IDLE:
                    start_pulse(t)
        else:
            trigger_low = value
            if trigger_low and not reset_on and rec.state.phase is Phase.IDLE:
                start_pulse(t)

    while rec.state.phase is Phase.TIMING and rec.state.t_ref + width <= t_end:
        end_pulse(rec.state.t_ref + width)

    trace.final_state = replace(rec.state, v_cap=rec.v_now(t_end))
    return trace


def simulate_astable(
    cfg: AstableConfig,
    gate: Optional[Iterable[tuple[float, bool]]] = None,
    t_end: float = 1e-3,
) -> EventTrace:
    """Free-running 555 oscillator gated through its reset pin.

    ``gate`` is a sorted list of ``(t, enabled)`` levels. With ``gate=None``
    the oscillator runs from t = 0; with a list it starts disabled until the
    first enabling entry. Each enable is a cold start from 0 V, so the first
    high phase lasts ``(r_a + r_b) c ln 3`` rather than ``ln 2``.
    """
    _require_positive(t_end=t_end)
    gate = [(0.0, True)] if gate is None else [(float(t), bool(en)) for t, en in gate]
    _check_sorted([t for t, _ in gate], "gate", t_end)

    vcc = cfg.supply.vcc
    upper = cfg.supply.upper_threshold
    lower = cfg.supply.lower_threshold
    tau_c = cfg.tau_charge
    tau_d = cfg.tau_discharge
    trace = EventTrace(t_end=t_end, vcc=vcc)
    rec = _Recorder(
        trace, Timer555State(0.0, False, True, Phase.IDLE, 0.0, reset_asserted=True), tau_d
    )
    enabled = False

    def next_switch() -> float:
        s = rec.state
        if s.phase is Phase.CHARGING:
            return s.t_ref + crossing_time(s.v_cap, vcc, upper, tau_c)
        if s.phase is Phase.DISCHARGING:
            return s.t_ref + crossing_time(s.v_cap, 0.0, lower, tau_d)
        return math.inf

    def advance(until: float) -> None:
        while True:
            t_sw = next_switch()
            if t_sw > until:
                return
            if rec.state.phase is Phase.CHARGING:
                rec.set(t_sw, output=False, phase=Phase.DISCHARGING, v0=upper, v_inf=0.0,
                        tau=tau_d)
            else:
                rec.set(t_sw, output=True, phase=Phase.CHARGING, v0=lower, v_inf=vcc,
                        tau=tau_c)

    for t, en in gate:
        advance(t)
        if en == enabled:
            continue
        enabled = en
        if enabled:
            rec.set(t, output=True, phase=Phase.CHARGING, v0=0.0, v_inf=vcc, tau=tau_c,
                    reset=False)
        else:
            rec.set(t, output=False, phase=Phase.IDLE, v0=0.0, v_inf=0.0, tau=tau_d,
                    reset=True)
    advance(t_end)

    trace.final_state = replace(rec.state, v_cap=rec.v_now(t_end))
    return trace


@dataclass(frozen=True)
class WaveformMeasurement:
    period: float
    t_high: float
    t_low: float
    cycles: int

    @property
    def frequency(self) -> float:
        return 1.0 / self.period

    @property
    def duty(self) -> float:
        """Low (discharge) fraction of the period."""
        return self.t_low / self.period


def measure_steady_state(trace: EventTrace, skip_cycles: int = 1) -> WaveformMeasurement:
    """Average period and phase lengths from complete output cycles.

    A cycle runs rising edge to rising edge. The first ``skip_cycles`` cycles
    after the first rising edge are dropped to exclude the cold-start charge.
    """
    edges = trace.transitions("output")
    rises = [e.t for e in edges if e.value]
    falls = [e.t for e in edges if not e.value and e.t > 0]
    rises = rises[skip_cycles:]
    if len(rises) < 2:
        raise ValueError("trace holds fewer than one steady-state cycle")
    cycles = len(rises) - 1
    period = (rises[-1] - rises[0]) / cycles
    highs = []
    for a, b in zip(rises, rises[1:]):
        i = bisect.bisect_right(falls, a)
        highs.append(falls[i] - a)
    t_high = math.fsum(highs) / cycles
    return WaveformMeasurement(period=period, t_high=t_high, t_low=period - t_high,
                               cycles=cycles)
