from importlib import resources
from pathlib import Path

import pytest


@pytest.fixture
def bundled():
    root = resources.files("irsim") / "scenarios"

    def get(name: str) -> Path:
        return Path(str(root / name))

    return get


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
