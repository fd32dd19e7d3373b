from __future__ import annotations

import pytest

from uinvariant.tables import data_dir, load_knot_csv, load_table

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    return load_table()


@pytest.fixture(scope="session")
def table_by_name(table):
    return {r.name: r for r in table}


@pytest.fixture(scope="session")
def links():
    return load_knot_csv(data_dir() / "links.csv")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
