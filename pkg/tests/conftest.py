from __future__ import annotations

import pytest

from aperiodic_tiles.generator import generate_window
from aperiodic_tiles.model import Coord2
from aperiodic_tiles.rules import compile_tileset

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def tileset():
    return compile_tileset()


@pytest.fixture(scope="session")
def window27():
    return generate_window(Coord2(0, 0), 27, 27)


@pytest.fixture(scope="session")
def window81():
    return generate_window(Coord2(0, 0), 81, 81)


@pytest.fixture(scope="session")
def window243():
    return generate_window(Coord2(0, 0), 243, 243)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
