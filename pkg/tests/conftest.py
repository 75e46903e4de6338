from pathlib import Path

import pytest

from merozeta.germs import GermPair, example_germ, parse_germ
from merozeta.resgraph import Component, Kind, ResolutionGraph, blowup_free, parse_graph
from merozeta.resolve import ResolutionEngine

FIXTURES = Path(__file__).parent / "fixtures"


def load_graph(name: str) -> ResolutionGraph:
    return parse_graph((FIXTURES / name).read_text())


def load_germ(name: str) -> GermPair:
    return parse_germ((FIXTURES / name).read_text())


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def example1() -> ResolutionGraph:
    return load_graph("example1.graph")


@pytest.fixture(scope="session")
def example2() -> ResolutionGraph:
    return load_graph("example2.graph")


@pytest.fixture(scope="session")
def engine() -> ResolutionEngine:
    return ResolutionEngine()


@pytest.fixture(scope="session")
def resolved_example1(engine):
    return engine.run(load_germ("cusp_over_line.germ"))


@pytest.fixture(scope="session")
def resolved_example3(engine):
    return engine.run(load_germ("example3.germ"))


@pytest.fixture(scope="session")
def resolved_cusp(engine):
    return engine.run(example_germ("cusp"))


@pytest.fixture
def blown_up_away_from_origin():
    """x^2 y resolved, then a valence 3 exceptional curve built off the branch x = 0"""
    g = ResolutionGraph(
        [
            Component("E1", Kind.EXCEPTIONAL, 3, 0, 2, self_intersection=-1),
            Component("P1", Kind.STRICT_P, 1, 0, 1),
            Component("P2", Kind.STRICT_P, 2, 0, 1),
        ],
        [("E1", "P1"), ("E1", "P2")],
    )
    before = set(g.ids)
    g = blowup_free(g, "P2")
    [far] = set(g.ids) - before
    g = blowup_free(blowup_free(g, far), far)
    return g, far
