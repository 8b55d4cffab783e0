"""Parsing of SI quantities such as ``11.53k``, ``1.5nF`` or ``10ms``."""

from __future__ import annotations

import re
from decimal import Decimal

# SI prefix -> power of ten
PREFIXES = {
    "p": -12,
    "n": -9,
    "u": -6,
    "µ": -6,
    "μ": -6,
    "m": -3,
    "": 0,
    "k": 3,
    "K": 3,
    "M": 6,
    "G": 9,
}

# A bare trailing "m" is always milli, never metres.
UNIT_SYMBOLS = ("ohm", "Ohm", "Ω", "Hz", "F", "V", "A", "s")

_QUANTITY = re.compile(
    r"^\s*(?P<num>[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)\s*"
    r"(?P<prefix>[pnuµμmkKMG]?)"
    r"(?P<unit>" + "|".join(re.escape(u) for u in UNIT_SYMBOLS) + r")?\s*$"
)


def parse_quantity(value) -> float:
    """Convert a number or SI-suffixed string to a float.

    >>> parse_quantity("11.53k")
    11530.0
    >>> parse_quantity("1.5nF")
    1.5e-09
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a number, got {value!r}")
    m = _QUANTITY.match(value)
    if m is None:
        raise ValueError(f"cannot parse quantity {value!r}")
    # Decimal scaling keeps "1.5n" == 1.5e-9 exactly.
    return float(Decimal(m.group("num")).scaleb(PREFIXES[m.group("prefix")]))
