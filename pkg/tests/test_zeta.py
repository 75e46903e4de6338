from fractions import Fraction

from merozeta.exactalg import RootOfUnity, rf_poles
from merozeta.resgraph import Component, Kind, ResolutionGraph
from merozeta.zeta import (
    candidate_poles,
    eigenvalue_oracle,
    monodromy_eigenvalues,
    monodromy_zeta_at_infinity,
    monodromy_zeta_origin,
    topo_zeta_at_infinity,
    topo_zeta_global,
    topo_zeta_local,
)


def test_local_zeta_example1(example1):
    z = topo_zeta_local(example1)
    assert z.render() == "(20s^2+33s+12)/(15(s+1)(2s+1)^2)"
    assert [(p.location, p.order) for p in rf_poles(z)] == [(Fraction(-1), 1), (Fraction(-1, 2), 2)]


def test_global_zeta_matches_local_when_branch_stays_at_origin(example1):
    assert topo_zeta_global(example1) == topo_zeta_local(example1)


def test_monodromy_zeta_example1(example1):
    z = monodromy_zeta_origin(example1)
    assert z.as_dict == {5: 1, 10: -1, 15: 1, 30: -1}
    assert monodromy_eigenvalues(example1) == {2: -2, 6: -1, 10: -2, 30: -1}


def test_candidates_example1(example1):
    candidates = {c.location: list(c.components) for c in candidate_poles(example1)}
    assert candidates == {
        Fraction(-4): ["E9"],
        Fraction(-3, 2): ["E8"],
        Fraction(-1): ["E12"],
        Fraction(-2, 3): ["E1"],
        Fraction(-3, 5): ["E2"],
        Fraction(-8, 15): ["E6"],
        Fraction(-1, 2): ["E3", "E4", "E5", "E7"],
    }


def test_eigenvalue_oracle(example1):
    oracle = eigenvalue_oracle(example1)
    assert oracle.branch_witness(RootOfUnity(0, 1))
    assert not oracle.branch_witness(RootOfUnity(1, 2))
    assert oracle.origin_multiplicity(RootOfUnity(1, 2)) == -2
    assert oracle.is_eigenvalue(RootOfUnity(1, 6))
    assert not oracle.is_eigenvalue(RootOfUnity(1, 3))
    assert not oracle.is_eigenvalue(RootOfUnity(1, 7))


def test_zeta_at_infinity(example1):
    z = topo_zeta_at_infinity(example1)
    assert z.evaluate(0) == Fraction(1, 5)
    assert [p.location for p in rf_poles(z)] == [Fraction(-1)]
    assert monodromy_zeta_at_infinity(example1).is_one


def _printed_example2(s: Fraction) -> Fraction:
    return -(560 * s**3 + 1274 * s**2 + 767 * s + 132) / (2 * (s + 1) * (7 * s + 4) * (2 * s + 1))


def test_example2(example2):
    z = topo_zeta_local(example2)
    assert z.render() == "-(114s^2+7s-28)/(2(s+1)(7s+4)(2s+1))"
    assert [(p.location, p.order) for p in rf_poles(z)] == [
        (Fraction(-1), 1),
        (Fraction(-4, 7), 1),
        (Fraction(-1, 2), 1),
    ]
    assert monodromy_zeta_origin(example2).render() == "1/((1-t^5)^16(1-t^7)^4(1-t^8)^8)"
    assert Fraction(-3, 5) in z.candidate_locations()


def test_example2_printed_value_adds_the_dicritical_singleton(example2):
    # 흔히 인용되는 값은 dicritical E1 의 단독항 chi(E1)/nu_1 을 더한 것이다
    e1 = example2.component("E1")
    assert e1.dicritical and e1.n == 0
    singleton = Fraction(2 - example2.valence("E1"), e1.nu)
    assert singleton == -20
    z = topo_zeta_local(example2)
    for s in [Fraction(0), Fraction(1), Fraction(-1, 3), Fraction(5, 2), Fraction(-7)]:
        assert _printed_example2(s) - z.evaluate(s) == singleton


def test_lone_branch():
    g = ResolutionGraph([Component("P1", Kind.STRICT_P, 2, 0, 1)], [])
    z = topo_zeta_local(g)
    assert z.evaluate(0) == 1
    assert [p.location for p in rf_poles(z)] == [Fraction(-1, 2)]
    assert monodromy_zeta_origin(g).as_dict == {2: 1}


def test_strict_q_never_contributes():
    g = ResolutionGraph(
        [
            Component("E1", Kind.EXCEPTIONAL, 1, 1, 2, self_intersection=-1, dicritical=True),
            Component("P1", Kind.STRICT_P, 1, 0, 1),
            Component("Q1", Kind.STRICT_Q, 0, 1, 1),
        ],
        [("E1", "P1"), ("E1", "Q1")],
    )
    assert [c.components for c in candidate_poles(g)] == [("P1",)]
    assert monodromy_zeta_origin(g).is_one
