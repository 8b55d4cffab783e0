import pytest

from irsim.units import parse_quantity


@pytest.mark.parametrize("text, value", [
    ("11.53k", 11530.0),
    ("1.5n", 1.5e-9),
    ("0.0015u", 1.5e-9),
    ("0.0015µF", 1.5e-9),
    ("10ms", 0.01),
    ("2.2kΩ", 2200.0),
    ("38kHz", 38000.0),
    ("0.4", 0.4),
    ("1M", 1e6),
    (" 220 ", 220.0),
    (7, 7.0),
    (0.5, 0.5),
])
def test_parse(text, value):
    assert parse_quantity(text) == value


@pytest.mark.parametrize("bad", ["", "abc", "1.2.3", "5 x", True, None, [1]])
def test_reject(bad):
    with pytest.raises(ValueError):
        parse_quantity(bad)
