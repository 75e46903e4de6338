"""
Invariants checked over a seeded corpus of engine-produced resolutions

The default run uses the first FAST_CORPUS_SIZE germs of the seeded stream.
The full sweep over CORPUS_SIZE germs is marked slow: `pytest -m slow`.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from merozeta.conjecture import check_conjecture, proof_trace
from merozeta.errors import NonRationalCenter
from merozeta.exactalg import rf_poles
from merozeta.germs import GermPair
from merozeta.poleanalysis import alpha_bounds_audit, veys_certificate, veys_converse_audit
from merozeta.resgraph import (
    Kind,
    ResolutionGraph,
    blowup_free,
    blowup_satellite,
    check_graph,
    derive,
    id_key,
    validate_relations,
)
from merozeta.resolve import ResolutionEngine
from merozeta.structure import (
    bamboo_ratio_constant,
    cd_components,
    divisors_of_multiplicities,
    ratio_identity_sweep,
    zero_components,
)
from merozeta.zeta import (
    candidate_poles,
    monodromy_zeta_origin,
    topo_zeta_global,
    topo_zeta_local,
)

logger = logging.getLogger(__name__)

CORPUS_SIZE = 200
FAST_CORPUS_SIZE = 20
MAX_ATTEMPTS = 600
SEED = 20240611
BLOWUPS_PER_GRAPH = 100

SLOPES = range(-3, 4)
COEFFICIENTS = [Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3)]


@dataclass(frozen=True)
class CorpusEntry:
    germ: GermPair
    graph: ResolutionGraph
    reduced_holomorphic: bool


def _branch(rng: random.Random, slope: int) -> str:
    """(y - slope*x)^q - c*x^p with gcd(p, q) = 1, never a bare line"""
    q = rng.choice([1, 2, 3])
    p = rng.choice([n for n in range(1, 8) if gcd(n, q) == 1 and (q > 1 or n > 1)])
    c = rng.choice(COEFFICIENTS)
    return f"((y - ({slope})*x)**{q} - ({c})*x**{p})"


def random_germ(rng: random.Random) -> Tuple[GermPair, bool]:
    slopes = rng.sample(SLOPES, 4)
    n_p = rng.choice([1, 1, 2])
    n_q = rng.choice([0, 1, 1, 2])
    p_parts = [_branch(rng, s) for s in slopes[:n_p]]
    q_parts = [_branch(rng, s) for s in slopes[n_p : n_p + n_q]]
    squared = rng.random() < 0.25
    if squared:
        p_parts[0] += "**2"
    germ = GermPair.from_expr("*".join(p_parts), "*".join(q_parts) or "1")
    return germ, not squared and not q_parts


def random_blowups(g: ResolutionGraph, steps: Sequence[Tuple[bool, int]]) -> ResolutionGraph:
    for free, k in steps:
        edges = list(g.edges)
        if free or not edges:
            ids = sorted(g.ids, key=id_key)
            g = blowup_free(g, ids[k % len(ids)])
        else:
            g = blowup_satellite(g, edges[k % len(edges)])
    return g


def build_corpus(size: int) -> List[CorpusEntry]:
    rng = random.Random(SEED)
    engine = ResolutionEngine()
    entries: List[CorpusEntry] = []
    skipped = 0
    attempts = 0
    while len(entries) < size and attempts < MAX_ATTEMPTS:
        attempts += 1
        germ, reduced_holomorphic = random_germ(rng)
        try:
            graph = engine.resolve(germ)
        except NonRationalCenter:
            skipped += 1
            continue
        entries.append(CorpusEntry(germ, graph, reduced_holomorphic))
    logger.info(f"Corpus: {len(entries)} graphs, {skipped} skipped for irrational centers")
    return entries


@pytest.fixture(scope="module")
def corpus() -> List[CorpusEntry]:
    return build_corpus(FAST_CORPUS_SIZE)


@pytest.fixture(scope="module")
def full_corpus() -> List[CorpusEntry]:
    return build_corpus(CORPUS_SIZE)


@pytest.fixture(scope="module")
def graphs(corpus, example1, example2) -> List[ResolutionGraph]:
    return [example1, example2] + [e.graph for e in corpus]


def _far_blowups(g: ResolutionGraph) -> ResolutionGraph:
    """Two free blowups on a curve created off a strict branch of P, away from the origin"""
    branch = sorted(g.strict(Kind.STRICT_P), key=lambda c: id_key(c.id))[0]
    before = set(g.ids)
    g = blowup_free(g, branch.id)
    [far] = set(g.ids) - before
    return blowup_free(blowup_free(g, far), far)


def check_validity(graphs: Sequence[ResolutionGraph]) -> None:
    for g in graphs:
        check_graph(g)
        report = validate_relations(g)
        assert report.passed, (g, report.failures)


def check_poles(graphs: Sequence[ResolutionGraph]) -> None:
    for g in graphs:
        zeta = topo_zeta_local(g)
        if zeta.is_zero:
            continue
        candidates = {c.location for c in candidate_poles(g)}
        for pole in rf_poles(zeta):
            assert pole.location < 0
            assert pole.location in candidates, (g, pole.location)
            assert veys_certificate(g, pole.location)
        report = check_conjecture(g)
        assert report.certified, (g, report.violations)


def check_structure(graphs: Sequence[ResolutionGraph]) -> None:
    for g in graphs:
        assert all(r.passed for r in ratio_identity_sweep(g) if r.eligible)
        assert all(b.passed for b in bamboo_ratio_constant(g))
        assert all(z.passed for z in zero_components(g))
        for d in divisors_of_multiplicities(g):
            for component in cd_components(g, d):
                assert component.holds, (g, d, component.subgraph.sorted_ids)


def check_exponent_sum(entries: Sequence[CorpusEntry]) -> int:
    """Over a tree of local curves the monodromy exponents add up to 2 - #branches"""
    checked = 0
    for entry in entries:
        g = entry.graph
        if not entry.germ.is_holomorphic:
            continue
        arrowheads = len(g.strict(Kind.STRICT_P))
        exponents = monodromy_zeta_origin(g).as_dict
        assert sum(exponents.values()) == 2 - arrowheads, g
        if g.exceptional():
            data = derive(g)
            assert sum(data.components[c.id].chi_local for c in g.exceptional()) == 2 - arrowheads
        checked += 1
    return checked


def check_traces(graphs: Sequence[ResolutionGraph]) -> None:
    for g in graphs:
        for verdict in check_conjecture(g).per_pole:
            trace = proof_trace(g, verdict.pole)
            assert trace.d == verdict.root_of_unity.order
            assert bool(trace.branch_components) == (verdict.certificate.kind == "branch")
            if verdict.certificate.kind == "origin":
                assert trace.origin_multiplicity == verdict.certificate.multiplicity
            if trace.case != "branch":
                assert g.component(trace.witness).is_local
                assert trace.component.holds
            if g.has_local_exceptional:
                # chi_local of a local curve is its Euler characteristic in the C_d count
                components = cd_components(g, trace.d)
                assert trace.origin_multiplicity == sum(c.euler_sum for c in components)


def check_reduced_holomorphic(entries: Sequence[CorpusEntry]) -> None:
    for entry in entries:
        if not entry.reduced_holomorphic:
            continue
        assert alpha_bounds_audit(entry.graph, "holomorphicMinimal").passed
        assert not veys_converse_audit(entry.graph).failures


def _invariants(g: ResolutionGraph):
    return topo_zeta_local(g), topo_zeta_global(g), monodromy_zeta_origin(g)


def _steps(rng: random.Random, count: int) -> List[Tuple[bool, int]]:
    return [(rng.random() < 0.5, rng.randrange(10**6)) for _ in range(count)]


def test_corpus_size(corpus):
    assert len(corpus) == FAST_CORPUS_SIZE


def test_graphs_are_valid(graphs):
    check_validity(graphs)


def test_poles_are_negative_candidates_and_certified(graphs):
    check_poles(graphs)


def test_structure_identities(graphs):
    check_structure(graphs)


def test_monodromy_exponent_sum(corpus):
    check_exponent_sum(corpus)


def test_proof_traces_agree_with_certificates(graphs):
    check_traces(graphs)


def test_proof_traces_ignore_curves_away_from_origin(corpus):
    blown_up = [_far_blowups(e.graph) for e in corpus]
    for g, entry in zip(blown_up, corpus):
        assert topo_zeta_local(g) == topo_zeta_local(entry.graph)
    check_poles(blown_up)
    check_traces(blown_up)


def test_reduced_holomorphic_inputs(corpus):
    check_reduced_holomorphic(corpus)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_blowup_invariance_on_fixtures(name, request):
    g = request.getfixturevalue(name)
    rng = random.Random(name)
    blown_up = random_blowups(g, _steps(rng, BLOWUPS_PER_GRAPH))
    assert len(blown_up) == len(g) + BLOWUPS_PER_GRAPH
    assert _invariants(blown_up) == _invariants(g)
    assert validate_relations(blown_up).passed


def test_blowup_invariance_on_corpus(corpus):
    # one free and one satellite blowup per graph
    rng = random.Random(SEED)
    for entry in corpus:
        steps = [(True, rng.randrange(10**6)), (False, rng.randrange(10**6))]
        assert _invariants(random_blowups(entry.graph, steps)) == _invariants(entry.graph)


blowup_steps = st.lists(st.tuples(st.booleans(), st.integers(0, 10**6)), max_size=15)


@settings(max_examples=40, deadline=None)
@given(blowup_steps)
def test_blowups_never_change_zeta(example1, steps):
    assert _invariants(random_blowups(example1, steps)) == _invariants(example1)


# full sweep


@pytest.mark.slow
def test_full_corpus(full_corpus):
    assert len(full_corpus) == CORPUS_SIZE
    assert any(e.reduced_holomorphic for e in full_corpus)
    assert any(not e.germ.is_holomorphic for e in full_corpus)
    graphs = [e.graph for e in full_corpus]
    check_validity(graphs)
    check_poles(graphs)
    check_structure(graphs)
    assert check_exponent_sum(full_corpus) > 0
    check_traces(graphs + [_far_blowups(g) for g in graphs])
    check_reduced_holomorphic(full_corpus)


@pytest.mark.slow
def test_blowup_invariance_on_full_corpus(full_corpus):
    rng = random.Random(SEED)
    for entry in full_corpus:
        steps = _steps(rng, BLOWUPS_PER_GRAPH)
        assert _invariants(random_blowups(entry.graph, steps)) == _invariants(entry.graph)
