"""
Text rendering of reports
"""

import logging
from typing import Any, Dict, List

import pandas as pd

from .resgraph import ResolutionGraph, id_key
from .schemas import (
    AuditResponse,
    ConjectureResponse,
    PolesResponse,
    ValidateResponse,
    ZetaResponse,
)

logger = logging.getLogger(__name__)


def _table(records: List[Dict[str, Any]], columns: List[str]) -> str:
    if not records:
        return "(none)"
    df = pd.DataFrame(records, columns=columns)
    return df.to_string(index=False)


def graph_table(g: ResolutionGraph) -> pd.DataFrame:
    rows = []
    for c in sorted(g.components, key=lambda c: id_key(c.id)):
        rows.append(
            {
                "id": c.id,
                "kind": c.kind.value,
                "NP": c.n_p,
                "NQ": c.n_q,
                "nu": c.nu,
                "N": c.n,
                "valence": g.valence(c.id),
                "self": "" if c.self_intersection is None else c.self_intersection,
                "dicritical": "yes" if c.dicritical else "",
            }
        )
    return pd.DataFrame(rows)


def render_graph(g: ResolutionGraph) -> str:
    lines = [graph_table(g).to_string(index=False), ""]
    lines.append("edges: " + ", ".join(f"{a}-{b}" for a, b in g.edges))
    return "\n".join(lines)


def render_zeta(report: ZetaResponse) -> str:
    lines = [
        f"monodromy zeta: {report.monodromy_zeta_text}",
        f"Z_top (local): {report.topological_zeta.text}",
        f"  reduced: {report.topological_zeta.reduced}",
    ]
    if report.global_zeta is not None:
        lines.append(f"Z_top (global): {report.global_zeta.text}")
        lines.append(f"  reduced: {report.global_zeta.reduced}")
    poles = ", ".join(f"{p.location} (order {p.order})" for p in report.poles)
    lines.append(f"poles: {poles or 'none'}")
    return "\n".join(lines)


def render_poles(report: PolesResponse) -> str:
    records = [
        {
            "candidate": r.location,
            "pole": "yes" if r.is_pole else "no",
            "order": r.order,
            "leading": r.leading_coefficient or "",
            "components": ",".join(r.components),
            "witnesses": ",".join(r.witnesses),
            "residues": " ".join(f"{k}:{'shared' if v is None else v}" for k, v in r.residues.items()),
        }
        for r in report.rows
    ]
    text = _table(records, ["candidate", "pole", "order", "leading", "components", "witnesses", "residues"])
    if report.converse_failures:
        text += "\ncandidates from valence >= 3 or strict P components that are not poles: "
        text += ", ".join(report.converse_failures)
    return text


def render_conjecture(report: ConjectureResponse) -> str:
    records = []
    for v in report.per_pole:
        cert = v.certificate
        if cert is None:
            witness = ""
        elif cert.kind == "branch":
            witness = f"branch {cert.component}"
        else:
            witness = f"origin multiplicity {cert.multiplicity}"
        records.append(
            {
                "pole": v.pole,
                "eigenvalue": f"exp(2πi·{v.root_k}/{v.root_n})",
                "verdict": v.verdict,
                "certificate": witness,
            }
        )
    lines = [_table(records, ["pole", "eigenvalue", "verdict", "certificate"])]
    if report.non_pole_candidates:
        lines.append("not poles: " + ", ".join(report.non_pole_candidates))
    lines.append("monodromy conjecture: " + ("certified" if report.certified else "VIOLATED"))
    return "\n".join(lines)


def render_validate(report: ValidateResponse) -> str:
    records = [r.model_dump() for r in report.relations]
    lines = [_table(records, ["component", "relation", "lhs", "rhs", "passed"])]
    lines.extend(f"warning: {w}" for w in report.warnings)
    lines.append("relations: " + ("pass" if report.passed else "FAIL"))
    return "\n".join(lines)


def render_audit(report: AuditResponse) -> str:
    s = report.sections
    lines = ["# taxonomy"]
    lines.append(
        _table(
            [
                {"start": b["start"], "members": "-".join(b["members"]), "primitive": b["primitive"]}
                for b in s["taxonomy"]["bamboos"]
            ],
            ["start", "members", "primitive"],
        )
    )
    lines.extend(f"note: {v}" for v in s["taxonomy"]["violations"])

    lines.append("\n# ratio identity")
    lines.append(_table(s["ratio_identity"], ["center", "lhs", "rhs", "eligible", "passed"]))

    lines.append("\n# bamboo ratios")
    lines.append(
        _table(
            [dict(b, members="-".join(b["members"])) for b in s["bamboo_ratios"]],
            ["start", "members", "applicable", "ratio", "passed"],
        )
    )

    lines.append("\n# zero components")
    lines.append(
        _table(
            [dict(z, components=",".join(z["components"])) for z in s["zero_components"]],
            ["components", "value", "meets_strict_P", "passed"],
        )
    )

    lines.append("\n# C_d")
    records = [
        dict(c, d=d, components=",".join(c["components"]))
        for d, comps in s["cd"].items()
        for c in comps
    ]
    lines.append(_table(records, ["d", "components", "euler_sum", "claim_applies", "holds"]))

    for scope, section in s["alpha_bounds"].items():
        lines.append(f"\n# alpha bounds ({scope})")
        lines.append(_table(section["entries"], ["center", "neighbor", "alpha", "valence", "status"]))

    lines.append("")
    lines.extend(f"failure: {f}" for f in s["failures"])
    lines.append("audit: " + ("pass" if report.passed else "FAIL"))
    return "\n".join(lines)

