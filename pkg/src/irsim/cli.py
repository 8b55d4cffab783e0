"""``irsim`` command line.

Exit status: 0 success, 1 failed checks, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from irsim import __version__
from irsim.errors import IrsimError, ScenarioConfigError
from irsim.io import load_scenario, write_trace
from irsim.scenario import run_scenario, summarize
from irsim.sweep import SWEEP_PARAMS, linspace, sweep, sweep_to_csv
from irsim.timer555 import (
    LN3,
    AstableConfig,
    MonostableConfig,
    SupplyRail,
    astable_timing,
    exact_astable_timing,
    led_current,
    led_series_resistance,
    monostable_pulse_width,
    solve_rb_for_frequency,
)
from irsim.units import parse_quantity
from irsim.verify import run_checks

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _quantity(text: str) -> float:
    try:
        return parse_quantity(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _values(text: str) -> list[float]:
    return [_quantity(v) for v in text.split(",") if v.strip()]


def bundled_scenarios() -> list[str]:
    root = resources.files("irsim") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".scenario"))


def resolve_scenario(path: str) -> Path:
    """A real file wins; otherwise fall back to a bundled scenario by name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.name.endswith(".scenario") else p.name + ".scenario"
    bundled = resources.files("irsim") / "scenarios" / name
    if bundled.is_file():
        return Path(str(bundled))
    return p


def cmd_verify(args) -> int:
    report = run_checks()
    print(report.table())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_simulate(args) -> int:
    cfg = load_scenario(resolve_scenario(args.scenario))
    if args.dt is not None:
        if not args.dt > 0:
            raise ScenarioConfigError("--dt must be positive", "sample_dt")
        cfg = replace(cfg, sample_dt=args.dt)
    trace = run_scenario(cfg)
    summary = summarize(trace).as_dict([v.id for v in cfg.vehicles])
    write_trace(trace, args.out, args.format, summary)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_scenario(resolve_scenario(args.scenario))
    if args.values:
        values = args.values
    else:
        if args.lo is None or args.hi is None or args.steps is None:
            raise ScenarioConfigError("sweep needs --from/--to/--steps or --values")
        values = linspace(args.lo, args.hi, args.steps)
    rows = sweep(cfg, args.param, values)
    text = sweep_to_csv(args.param, rows)
    Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_timer(args) -> int:
    if args.kind == "mono":
        cfg = MonostableConfig(args.r, args.c, SupplyRail(args.vcc))
        print(f"pulse width (1.1 RC): {monostable_pulse_width(cfg):.6g} s")
        print(f"pulse width (RC ln 3): {cfg.tau * LN3:.6g} s")
    elif args.kind == "astable":
        cfg = AstableConfig(args.ra, args.rb, args.c, SupplyRail(args.vcc))
        t = astable_timing(cfg)
        x = exact_astable_timing(cfg)
        print(f"t_high: {t.t_high:.6g} s")
        print(f"t_low: {t.t_low:.6g} s")
        print(f"period: {t.period:.6g} s")
        print(f"frequency: {t.frequency:.6g} Hz")
        print(f"duty: {t.duty:.6g}")
        print(f"frequency (ln 2 exact): {x.frequency:.6g} Hz")
    elif args.kind == "solve-rb":
        print(f"r_b: {solve_rb_for_frequency(args.f, args.ra, args.c):.6g} ohm")
    else:
        if (args.i is None) == (args.rs is None):
            print("error: timer led needs exactly one of --i or --rs", file=sys.stderr)
            return EXIT_INPUT
        if args.i is not None:
            r = led_series_resistance(args.vcc, args.vled, args.n, args.i)
            print(f"r_s: {r:.6g} ohm")
        else:
            print(f"i_led: {led_current(args.vcc, args.vled, args.n, args.rs):.6g} A")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the built-in check suite")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a scenario and write its trace")
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--dt", type=_quantity, help="override sample_dt (seconds)")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="sweep one parameter over a scenario")
    w.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    w.add_argument("--from", dest="lo", type=_quantity)
    w.add_argument("--to", dest="hi", type=_quantity)
    w.add_argument("--steps", type=int)
    w.add_argument("--values", type=_values, help="comma-separated explicit values")
    w.add_argument("--scenario", required=True)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("timer", help="555 and LED design calculators")
    tk = t.add_subparsers(dest="kind", required=True)
    m = tk.add_parser("mono")
    m.add_argument("--r", type=_quantity, required=True)
    m.add_argument("--c", type=_quantity, required=True)
    m.add_argument("--vcc", type=_quantity, default=9.0)
    a = tk.add_parser("astable")
    a.add_argument("--ra", type=_quantity, required=True)
    a.add_argument("--rb", type=_quantity, required=True)
    a.add_argument("--c", type=_quantity, required=True)
    a.add_argument("--vcc", type=_quantity, default=9.0)
    r = tk.add_parser("solve-rb")
    r.add_argument("--f", type=_quantity, required=True)
    r.add_argument("--ra", type=_quantity, required=True)
    r.add_argument("--c", type=_quantity, required=True)
    led = tk.add_parser("led")
    led.add_argument("--vcc", type=_quantity, required=True)
    led.add_argument("--vled", type=_quantity, required=True)
    led.add_argument("--n", type=int, required=True)
    led.add_argument("--i", type=_quantity)
    led.add_argument("--rs", type=_quantity)
    t.set_defaults(func=cmd_timer)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioConfigError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IrsimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
