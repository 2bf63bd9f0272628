"""
Pytest configuration for tests
"""

import pytest

from app.counting import default_table
from app.strata import enumerate_strata
from app.tetra_common import COUNT_TABLE_FILE


@pytest.fixture(scope="session")
def records():
    """The full stratum census (computed once per session)"""
    return enumerate_strata()


@pytest.fixture(scope="session")
def table():
    """The embedded count table"""
    return default_table()


@pytest.fixture
def table_lines():
    """Lines of the embedded count table, newline-terminated"""
    with open(COUNT_TABLE_FILE, "r", encoding="utf-8") as f:
        return f.readlines()


@pytest.fixture
def write_table(tmp_path):
    """Write count-table lines to tmp_path/count_table.txt and return the path"""

    def _write(lines):
        path = tmp_path / "count_table.txt"
        path.write_text("".join(lines), encoding="utf-8")
        return str(path)

    return _write


def line_number_of(lines, prefix_cols):
    """1-based line number of the first data line starting with the given columns"""
    for number, line in enumerate(lines, start=1):
        if line.split()[: len(prefix_cols)] == list(prefix_cols):
            return number
    raise KeyError(prefix_cols)
