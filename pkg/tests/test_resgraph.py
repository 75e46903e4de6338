import json
from dataclasses import replace
from fractions import Fraction

import pytest

from merozeta.errors import GraphSemanticsError, GraphSyntaxError, UnknownComponent, UnknownEdge
from merozeta.resgraph import (
    Component,
    GraphBuilder,
    Kind,
    ResolutionGraph,
    blowup_free,
    blowup_satellite,
    check_graph,
    derive,
    invert_germ,
    isomorphic,
    parse_graph,
    serialize_graph,
    validate_relations,
)


def _single_blowup() -> ResolutionGraph:
    return ResolutionGraph(
        [
            Component("E1", Kind.EXCEPTIONAL, 1, 0, 2, self_intersection=-1),
            Component("S", Kind.STRICT_P, 1, 0, 1),
        ],
        [("E1", "S")],
    )


def test_parse_example1(example1):
    assert len(example1) == 12
    assert len(example1.edges) == 11
    assert example1.component("E10").dicritical is True
    assert [c.id for c in example1.neighbors("E3")] == ["E1", "E2", "E4"]


def test_derive_example1(example1):
    data = derive(example1)
    assert data["E3"].valence == 3
    assert data["E3"].chi_local == -1
    assert data["E3"].n == 10
    assert data["E3"].in_s0
    assert data["E12"].chi_local == 0
    assert data["E12"].chi_global == 0
    assert data["E12"].n == 1
    assert data.pair_chi_local("E7", "E12") == 1
    assert data.pair_chi_local("E1", "E12") == 0


def test_lone_branch_has_local_chi_one():
    g = ResolutionGraph([Component("P1", Kind.STRICT_P, 1, 0, 1)], [])
    assert derive(g)["P1"].chi_local == 1


def test_cycle_is_rejected(example1):
    payload = json.loads(serialize_graph(example1))
    payload["edges"].append(["E2", "E4"])
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps(payload))
    assert exc.value.clause == "acyclic"


def test_unknown_key_is_a_syntax_error():
    text = json.dumps(
        {
            "components": [{"id": "E1", "kind": "exceptional", "NP": 1, "NQ": 0, "nu": 2, "colour": 1}],
            "edges": [],
        }
    )
    with pytest.raises(GraphSyntaxError):
        parse_graph(text)


@pytest.mark.parametrize(
    "component, clause",
    [
        ({"id": "S", "kind": "strict_P", "NP": 1, "NQ": 1, "nu": 1}, "strict-kind"),
        ({"id": "E1", "kind": "exceptional", "NP": 1, "NQ": 0, "nu": 1}, "exceptional-nu"),
        ({"id": "E1", "kind": "exceptional", "NP": 2, "NQ": 1, "nu": 2, "dicritical": True}, "dicritical-balance"),
        ({"id": "S", "kind": "strict_Q", "NP": 0, "NQ": 1, "nu": 1, "self_intersection": -1}, "exceptional-only-fields"),
    ],
)
def test_component_clauses(component, clause):
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps({"components": [component], "edges": []}))
    assert exc.value.clause == clause


def test_graph_clauses():
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps({"components": [], "edges": []}))
    assert exc.value.clause == "nonempty"

    two = [
        {"id": "P1", "kind": "strict_P", "NP": 1, "NQ": 0, "nu": 1},
        {"id": "Q1", "kind": "strict_Q", "NP": 0, "NQ": 1, "nu": 1},
    ]
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps({"components": two, "edges": []}))
    assert exc.value.clause == "connected"
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps({"components": two, "edges": [["P1", "Q1"]]}))
    assert exc.value.clause == "strict-strict-edge"
    with pytest.raises(GraphSemanticsError) as exc:
        parse_graph(json.dumps({"components": two, "edges": [["P1", "X"]]}))
    assert exc.value.clause == "known-ids"


def test_morphism_clause():
    g = ResolutionGraph(
        [
            Component("E1", Kind.EXCEPTIONAL, 2, 1, 2),
            Component("Q1", Kind.STRICT_Q, 0, 1, 1),
        ],
        [("E1", "Q1")],
    )
    with pytest.raises(GraphSemanticsError) as exc:
        check_graph(g)
    assert exc.value.clause == "morphism"
    check_graph(g, require_morphism=False)


def test_serialization_is_canonical(example1):
    text = serialize_graph(example1)
    again = parse_graph(text)
    assert again == example1
    assert serialize_graph(again) == text
    ids = [c["id"] for c in json.loads(text)["components"]]
    assert ids[:3] == ["E1", "E2", "E3"]
    assert ids.index("E9") < ids.index("E10")


def test_relations_on_single_blowup():
    report = validate_relations(_single_blowup())
    assert report.passed
    assert {(c.relation, c.lhs) for c in report.checks} == {(1, Fraction(1)), (2, Fraction(-1))}


def test_relations_on_example1(example1):
    report = validate_relations(example1)
    assert report.passed
    assert all(c.relation == 2 for c in report.checks)


def test_tampered_nu_breaks_relation_two(example1):
    tampered = example1.replace_component(replace(example1.component("E4"), nu=7))
    report = validate_relations(tampered)
    assert not report.passed
    assert report.failed_components(2) == {"E3", "E4", "E5"}


def test_undeclared_dicritical_warning(example1):
    undeclared = example1.replace_component(replace(example1.component("E10"), dicritical=None))
    report = validate_relations(undeclared)
    assert any("E10" in w for w in report.warnings)


def test_blowup_free_on_exceptional(example1):
    g = blowup_free(example1, "E3")
    new = g.component("E13")
    assert (new.n_p, new.n_q, new.nu) == (12, 2, 6)
    assert g.has_edge("E3", "E13")
    assert new.over_origin
    assert validate_relations(g).passed


def test_blowup_free_on_strict_leaves_origin(example1):
    g = blowup_free(example1, "E12")
    assert not g.component("E13").over_origin
    assert derive(g)["E13"].chi_local == 0


def test_blowup_free_on_lone_branch_lies_over_origin():
    g = blowup_free(ResolutionGraph([Component("P1", Kind.STRICT_P, 1, 0, 1)], []), "P1")
    assert g.component("E1").over_origin


def test_blowup_satellite(example1):
    g = blowup_satellite(example1, ("E3", "E4"))
    new = g.component("E13")
    assert (new.n_p, new.n_q, new.nu) == (26, 4, 11)
    assert not g.has_edge("E3", "E4")
    assert g.has_edge("E3", "E13") and g.has_edge("E13", "E4")

    g = blowup_satellite(example1, ("E10", "E11"))
    new = g.component("E13")
    assert (new.n_p, new.n_q, new.nu) == (4, 5, 6)


def test_blowup_satellite_needs_an_edge(example1):
    with pytest.raises(UnknownEdge):
        blowup_satellite(example1, ("E1", "E2"))
    with pytest.raises(UnknownComponent):
        blowup_free(example1, "E99")


def test_builder_numbering_skips_to_largest_id():
    builder = GraphBuilder()
    builder.add(Component("E7", Kind.EXCEPTIONAL, 1, 0, 2))
    builder.add(Component("P1", Kind.STRICT_P, 1, 0, 1))
    assert builder.next_exceptional_id() == "E8"


def test_invert_germ(example1):
    inverted = invert_germ(example1)
    e1 = inverted.component("E1")
    assert (e1.n_p, e1.n_q) == (1, 4)
    assert inverted.component("E11").kind is Kind.STRICT_P
    assert [c.id for c in inverted.components if c.n > 0] == ["E11"]
    assert invert_germ(inverted) == example1


def test_isomorphic_ignores_labels(example1):
    mapping = {"E11": "Q1", "E12": "P1"}
    relabeled = ResolutionGraph(
        [replace(c, id=mapping.get(c.id, c.id)) for c in example1.components],
        [(mapping.get(a, a), mapping.get(b, b)) for a, b in example1.edges],
    )
    assert isomorphic(example1, relabeled)
    assert not isomorphic(example1, blowup_free(example1, "E3"))
