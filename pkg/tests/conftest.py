from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from hypothesis import settings  # noqa: E402

from oracles import ACCEPTANCE_LINES  # noqa: E402

settings.register_profile("pkg", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("pkg")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
