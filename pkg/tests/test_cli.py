import json
from dataclasses import replace
from fractions import Fraction

import pytest

from merozeta.cli import EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED, EXIT_VIOLATION, main
from merozeta.exactalg import RationalFunction
from merozeta.resgraph import isomorphic, parse_graph, serialize_graph
from merozeta.zeta import topo_zeta_local


@pytest.fixture
def example1_path(fixtures_dir):
    return str(fixtures_dir / "example1.graph")


def test_zeta_text(example1_path, capsys):
    assert main(["zeta", "--graph", example1_path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Z_top (local): (20s^2+33s+12)/(15(s+1)(2s+1)^2)" in out
    assert "monodromy zeta: (1-t^5)(1-t^15)/((1-t^10)(1-t^30))" in out
    assert "-1/2 (order 2)" in out


def test_zeta_structured_reconstructs_function(example1, example1_path, capsys):
    assert main(["zeta", "--graph", example1_path, "--format", "structured", "--global"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    rf = payload["topological_zeta"]
    again = RationalFunction.from_factored(rf["numerator"], rf["factors"], rf["scalar"])
    assert again == topo_zeta_local(example1)
    assert payload["global_zeta"] is not None
    assert payload["monodromy_zeta"] == {"5": 1, "10": -1, "15": 1, "30": -1}


def test_check_certifies(example1_path, capsys):
    assert main(["check", "--graph", example1_path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "branch E12" in out
    assert "monodromy conjecture: certified" in out


def test_check_certifies_example2(fixtures_dir, capsys):
    assert main(["check", "--graph", str(fixtures_dir / "example2.graph")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "origin multiplicity -4" in out
    assert "origin multiplicity -8" in out
    assert "monodromy conjecture: certified" in out


def test_resolve_writes_graph_file(tmp_path, example1):
    out = tmp_path / "resolved.graph"
    assert main(["resolve", "--example", "cusp_over_line", "--out", str(out)]) == EXIT_OK
    assert isomorphic(parse_graph(out.read_text()), example1)


def test_resolve_structured(fixtures_dir, capsys):
    germ = str(fixtures_dir / "cusp.germ")
    assert main(["resolve", "--germ", germ, "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["exceptional"] == 3
    assert payload["completion_blowups"] == 0


def test_commands_accept_germs(capsys):
    assert main(["poles", "--example", "cusp"]) == EXIT_OK
    assert "-5/6" in capsys.readouterr().out


def test_validate_fails_on_tampered_graph(example1, tmp_path, capsys):
    path = tmp_path / "tampered.graph"
    path.write_text(serialize_graph(example1.replace_component(replace(example1.component("E4"), nu=7))))
    assert main(["validate", "--graph", str(path)]) == EXIT_VIOLATION
    assert "relations: FAIL" in capsys.readouterr().out


def test_audit_and_report_pass(example1_path, capsys):
    assert main(["audit", "--graph", example1_path, "--d", "2"]) == EXIT_OK
    assert "audit: pass" in capsys.readouterr().out
    assert main(["report", "--graph", example1_path, "--format", "structured"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["components"] == 12
    assert [t["case"] for t in report["proof_traces"]] == ["branch", "negative-sum"]


def test_missing_file_is_an_input_error(tmp_path, capsys):
    assert main(["zeta", "--graph", str(tmp_path / "missing.graph")]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_malformed_graph_is_an_input_error(tmp_path):
    path = tmp_path / "bad.graph"
    path.write_text("{not json")
    assert main(["check", "--graph", str(path)]) == EXIT_INPUT


def test_shift_needs_a_germ(example1_path):
    assert main(["zeta", "--graph", example1_path, "--at", "1"]) == EXIT_INPUT


def test_irrational_center_is_unsupported(tmp_path):
    path = tmp_path / "irrational.germ"
    path.write_text(
        json.dumps(
            {
                "P": [{"c": "1", "ex": 0, "ey": 2}, {"c": "-2", "ex": 2, "ey": 0}],
                "Q": [
                    {"c": "1", "ex": 0, "ey": 2},
                    {"c": "-2", "ex": 2, "ey": 0},
                    {"c": "1", "ex": 3, "ey": 0},
                ],
            }
        )
    )
    assert main(["resolve", "--germ", str(path)]) == EXIT_UNSUPPORTED


def test_value_shift(capsys):
    assert main(["zeta", "--example", "lines", "--at", "1", "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["monodromy_zeta"] == {}
    assert Fraction(payload["poles"][0]["location"]) == -1


def test_report_on_components_away_from_origin(tmp_path, blown_up_away_from_origin, capsys):
    g, _ = blown_up_away_from_origin
    path = tmp_path / "far.graph"
    path.write_text(serialize_graph(g))
    # the extra blowups make the graph non-minimal, so the shape audits may object
    status = main(["report", "--graph", str(path), "--format", "structured"])
    assert status in (EXIT_OK, EXIT_VIOLATION)
    report = json.loads(capsys.readouterr().out)
    assert [t["case"] for t in report["proof_traces"]] == ["branch", "branch"]
