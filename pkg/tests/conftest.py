from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from beadcut.instances import parse_instance, parse_result
from beadcut.model import Necklace

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_bytes(name):
    return (FIXTURES / name).read_bytes()


def load_instance(name):
    return parse_instance(fixture_bytes(name))


def load_result(name):
    return parse_result(fixture_bytes(name))


@pytest.fixture
def fig2():
    return load_instance("fig2.json").problem


@pytest.fixture
def fig3():
    return load_instance("fig3.json").problem


quarters = st.integers(0, 12).map(lambda q: Fraction(q, 4))


@st.composite
def necklaces(draw, max_players=4, max_beads=8, values=quarters):
    n = draw(st.integers(1, max_players))
    k = draw(st.integers(0, max_beads))
    beads = [[draw(values) for _ in range(n)] for _ in range(k)]
    return Necklace.from_values(beads, n)


@st.composite
def cutsets(draw, length, n_players):
    cuts = sorted(draw(st.lists(st.integers(0, length), min_size=n_players - 1,
                                max_size=n_players - 1)))
    return tuple(cuts)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
