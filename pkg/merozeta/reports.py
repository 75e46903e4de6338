"""
Report assembly shared by the CLI and the HTTP service
"""

import logging
from typing import Any, Dict, List, Optional

from .conjecture import check_conjecture, proof_trace
from .exactalg import RationalFunction, rf_poles
from .poleanalysis import (
    alpha_bounds_audit,
    certificate_witnesses,
    residue_table,
    veys_converse_audit,
)
from .resgraph import Kind, ResolutionGraph, graph_to_file, validate_relations
from .resolve import ChartState
from .schemas import (
    AuditResponse,
    CertificateOut,
    ConjectureResponse,
    PoleOut,
    PoleRowOut,
    PolesResponse,
    PoleVerdictOut,
    RationalFunctionOut,
    RelationOut,
    ResolveResponse,
    ValidateResponse,
    ZetaResponse,
)
from .structure import (
    bamboo_ratio_constant,
    cd_components,
    divisors_of_multiplicities,
    ratio_identity_sweep,
    taxonomy,
    zero_components,
)
from .zeta import candidate_poles, monodromy_zeta_origin, topo_zeta_global, topo_zeta_local

logger = logging.getLogger(__name__)


def rational_function_out(f: RationalFunction) -> RationalFunctionOut:
    payload = f.to_payload()
    return RationalFunctionOut(
        numerator=payload["numerator"],
        factors=[tuple(x) for x in payload["factors"]],
        scalar=payload["scalar"],
        text=f.render(),
        reduced=f.render_reduced(),
    )


def zeta_report(g: ResolutionGraph, include_global: bool = False) -> ZetaResponse:
    zeta = topo_zeta_local(g)
    monodromy = monodromy_zeta_origin(g)
    return ZetaResponse(
        monodromy_zeta=monodromy.to_payload(),
        monodromy_zeta_text=monodromy.render(),
        topological_zeta=rational_function_out(zeta),
        global_zeta=rational_function_out(topo_zeta_global(g)) if include_global else None,
        poles=[] if zeta.is_zero else [PoleOut.model_validate(p) for p in rf_poles(zeta)],
    )


def poles_report(g: ResolutionGraph) -> PolesResponse:
    zeta = topo_zeta_local(g)
    poles = {} if zeta.is_zero else {p.location: p for p in rf_poles(zeta)}
    rows = []
    for candidate in candidate_poles(g):
        pole = poles.get(candidate.location)
        rows.append(
            PoleRowOut(
                location=candidate.location,
                is_pole=pole is not None,
                order=pole.order if pole else 0,
                leading_coefficient=pole.leading_coefficient if pole else None,
                components=list(candidate.components),
                witnesses=certificate_witnesses(g, candidate.location) if pole else [],
                residues={
                    cid: None if r is None else str(r)
                    for cid, r in residue_table(g, candidate.location).items()
                },
            )
        )
    audit = veys_converse_audit(g)
    return PolesResponse(rows=rows, converse_failures=[e.location for e in audit.failures])


def conjecture_report(g: ResolutionGraph) -> ConjectureResponse:
    report = check_conjecture(g)
    return ConjectureResponse(
        certified=report.certified,
        per_pole=[
            PoleVerdictOut(
                pole=v.pole,
                root_k=v.root_k,
                root_n=v.root_n,
                verdict=v.verdict,
                certificate=CertificateOut.model_validate(v.certificate) if v.certificate else None,
            )
            for v in report.per_pole
        ],
        non_pole_candidates=report.non_pole_candidates,
    )


def validate_report(g: ResolutionGraph) -> ValidateResponse:
    report = validate_relations(g)
    return ValidateResponse(
        passed=report.passed,
        relations=[
            RelationOut(
                component=c.component, relation=c.relation, lhs=c.lhs, rhs=c.rhs, passed=c.passed
            )
            for c in report.checks
        ],
        warnings=report.warnings,
    )


def _alpha_section(g: ResolutionGraph) -> Dict[str, Any]:
    section: Dict[str, Any] = {}
    scopes = ["all", "pSubgraph"]
    if all(c.n_q == 0 for c in g.components):
        scopes.insert(1, "holomorphicMinimal")
    for scope in scopes:
        report = alpha_bounds_audit(g, scope)
        section[scope] = {
            "passed": report.passed,
            "subgraphs": [list(s) for s in report.subgraphs],
            "entries": [
                {
                    "center": e.center,
                    "neighbor": e.neighbor,
                    "alpha": str(e.alpha),
                    "valence": e.center_valence,
                    "status": e.status,
                }
                for e in report.entries
            ],
        }
    return section


def audit_report(g: ResolutionGraph, d: Optional[int] = None) -> AuditResponse:
    """Structure audits; shape constraints of minimal resolutions are reported, not enforced"""
    shape = taxonomy(g)
    ratios = ratio_identity_sweep(g)
    bamboos = bamboo_ratio_constant(g)
    zeros = zero_components(g)
    divisors = [d] if d is not None else divisors_of_multiplicities(g)
    cd = {n: cd_components(g, n) for n in divisors}
    alpha = _alpha_section(g)

    sections: Dict[str, Any] = {
        "taxonomy": {
            "valences": shape.valences,
            "bamboos": [
                {"start": b.start, "members": list(b.members), "primitive": b.primitive}
                for b in shape.bamboos
            ],
            "primitive_branches": [
                {"vertex": b.vertex, "members": sorted(b.members)} for b in shape.primitive_branches
            ],
            "violations": shape.violations,
        },
        "ratio_identity": [
            {
                "center": r.center,
                "lhs": str(r.lhs),
                "rhs": str(r.rhs),
                "eligible": r.eligible,
                "passed": r.passed,
            }
            for r in ratios
        ],
        "bamboo_ratios": [
            {
                "start": b.bamboo.start,
                "members": list(b.bamboo.members),
                "applicable": b.applicable,
                "ratio": None if b.ratio is None else str(b.ratio),
                "passed": b.passed,
            }
            for b in bamboos
        ],
        "zero_components": [
            {
                "components": z.subgraph.sorted_ids,
                "value": z.value,
                "meets_strict_P": z.meets_strict_p,
                "passed": z.passed,
            }
            for z in zeros
        ],
        "cd": {
            str(n): [
                {
                    "components": c.subgraph.sorted_ids,
                    "euler_sum": c.euler_sum,
                    "claim_applies": c.claim_applies,
                    "holds": c.holds,
                }
                for c in comps
            ]
            for n, comps in cd.items()
        },
        "alpha_bounds": alpha,
    }

    failures: List[str] = []
    failures += [f"ratio identity at {r.center}" for r in ratios if r.eligible and not r.passed]
    failures += [f"bamboo off {b.bamboo.start}" for b in bamboos if not b.passed]
    failures += [f"zero component {z.subgraph.sorted_ids}" for z in zeros if not z.passed]
    failures += [
        f"C_{n} component {c.subgraph.sorted_ids}" for n, comps in cd.items() for c in comps if not c.holds
    ]
    failures += [f"alpha bounds ({scope})" for scope, s in alpha.items() if scope != "all" and not s["passed"]]
    for failure in failures:
        logger.warning(f"Audit failure: {failure}")
    sections["failures"] = failures
    return AuditResponse(passed=not failures, sections=sections)


def proof_traces(g: ResolutionGraph) -> List[Dict[str, Any]]:
    zeta = topo_zeta_local(g)
    traces = []
    for pole in [] if zeta.is_zero else rf_poles(zeta):
        trace = proof_trace(g, pole.location)
        traces.append(
            {
                "pole": str(trace.pole),
                "d": trace.d,
                "case": trace.case,
                "witness": trace.witness,
                "branch_components": trace.branch_components,
                "euler_sum": trace.euler_sum,
                "origin_multiplicity": trace.origin_multiplicity,
            }
        )
    return traces


def resolve_report(state: ChartState) -> ResolveResponse:
    return ResolveResponse(
        graph=graph_to_file(state.graph),
        exceptional=len(state.graph.exceptional()),
        completion_blowups=state.completion_blowups,
    )


def full_report(
    g: ResolutionGraph, d: Optional[int] = None, include_global: bool = True
) -> Dict[str, Any]:
    """Everything in one document"""
    return {
        "components": len(g),
        "strict_P": len(g.strict(Kind.STRICT_P)),
        "strict_Q": len(g.strict(Kind.STRICT_Q)),
        "zeta": zeta_report(g, include_global=include_global).model_dump(),
        "poles": poles_report(g).model_dump(),
        "conjecture": conjecture_report(g).model_dump(),
        "proof_traces": proof_traces(g),
        "validate": validate_report(g).model_dump(),
        "audit": audit_report(g, d).model_dump(),
    }
