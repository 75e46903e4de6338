"""
Shape of resolution graphs: bamboos and branches, ratio identities, zero components, C_d
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
from sympy import divisors

from .errors import NotExceptional, ZeroMultiplicity
from .resgraph import Kind, ResolutionGraph, id_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubgraphComponent:
    component_ids: FrozenSet[str]
    boundary: FrozenSet[Tuple[str, str]]  # (inside, outside)

    @property
    def sorted_ids(self) -> List[str]:
        return sorted(self.component_ids, key=id_key)


def _subgraph_components(g: ResolutionGraph, ids) -> List[SubgraphComponent]:
    """Connected components of the subgraph induced on ids (edges of g only)"""
    induced = g.graph.subgraph(ids)
    result = []
    for members in nx.connected_components(induced):
        boundary = frozenset(
            (m, nb) for m in members for nb in g.graph.neighbors(m) if nb not in members
        )
        result.append(SubgraphComponent(component_ids=frozenset(members), boundary=boundary))
    result.sort(key=lambda s: id_key(s.sorted_ids[0]))
    return result


# ---------------------------------------------------------------------------
# taxonomy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bamboo:
    start: str
    members: Tuple[str, ...]  # from the start's neighbor to the leaf
    primitive: bool

    @property
    def leaf(self) -> str:
        return self.members[-1]

    @property
    def vertices(self) -> Tuple[str, ...]:
        return (self.start,) + self.members


@dataclass(frozen=True)
class Branch:
    vertex: str
    members: FrozenSet[str]
    primitive: bool
    is_bamboo: bool


@dataclass
class TaxonomyReport:
    valences: Dict[str, int]
    bamboos: List[Bamboo]
    branches: List[Branch]
    violations: List[str] = field(default_factory=list)

    @property
    def primitive_bamboos(self) -> List[Bamboo]:
        return [b for b in self.bamboos if b.primitive]

    @property
    def primitive_branches(self) -> List[Branch]:
        return [b for b in self.branches if b.primitive and not b.is_bamboo]


def _maximal_bamboos(g: ResolutionGraph) -> List[Bamboo]:
    bamboos: List[Bamboo] = []
    seen = set()
    leaves = [cid for cid in g.ids if g.valence(cid) == 1]
    # orient path graphs so the strict end is the start
    leaves.sort(key=lambda cid: (g.component(cid).is_strict, id_key(cid)))
    for leaf in leaves:
        path = [leaf]
        previous, current = leaf, g.neighbors(leaf)[0].id
        while g.valence(current) == 2:
            path.append(current)
            previous, current = current, next(
                nb.id for nb in g.neighbors(current) if nb.id != previous
            )
        key = frozenset(path + [current])
        if g.valence(current) == 1 and key in seen:
            continue
        seen.add(key)
        bamboos.append(
            Bamboo(
                start=current,
                members=tuple(reversed(path)),
                primitive=not g.component(leaf).is_strict,
            )
        )
    return bamboos


def _branches(g: ResolutionGraph) -> List[Branch]:
    branches = []
    for v in g.ids:
        view = nx.restricted_view(g.graph, [v], [])
        for nb in g.neighbors(v):
            members = nx.node_connected_component(view, nb.id)
            primitive = not any(g.component(m).is_strict for m in members)
            valences = [g.valence(m) for m in members]
            is_bamboo = all(val <= 2 for val in valences) and valences.count(1) == 1
            branches.append(
                Branch(vertex=v, members=frozenset(members), primitive=primitive, is_bamboo=is_bamboo)
            )
    return branches


def taxonomy(g: ResolutionGraph) -> TaxonomyReport:
    """Valences, bamboos, branches and the shape constraints of minimal resolutions"""
    report = TaxonomyReport(
        valences={cid: g.valence(cid) for cid in g.ids},
        bamboos=_maximal_bamboos(g),
        branches=_branches(g),
    )

    per_start = Counter(b.start for b in report.primitive_bamboos)
    crowded = sorted((v for v, n in per_start.items() if n >= 2), key=id_key)
    for v in crowded:
        if per_start[v] > 2:
            report.violations.append(f"clause 2: {per_start[v]} primitive bamboos leave {v}")
    doubles = [v for v in crowded if per_start[v] == 2]
    if len(doubles) > 1:
        report.violations.append(
            f"clause 2: two primitive bamboos leave more than one vertex ({', '.join(doubles)})"
        )

    per_vertex = Counter(b.vertex for b in report.primitive_branches)
    for v in sorted(per_vertex, key=id_key):
        if per_vertex[v] > 1:
            report.violations.append(
                f"clause 3: {per_vertex[v]} primitive branches that are not bamboos leave {v}"
            )

    for message in report.violations:
        logger.info(f"Non-minimal shape: {message}")
    return report


# ---------------------------------------------------------------------------
# ratio identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioCheck:
    center: str
    lhs: Fraction  # sum N_i^P / N^P
    rhs: Fraction  # sum N_i^Q / N^Q
    eligible: bool  # no strict neighbor

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


def ratio_identity_check(g: ResolutionGraph, center: str) -> RatioCheck:
    c = g.component(center)
    if not c.is_exceptional:
        raise NotExceptional(center)
    if c.n_p == 0:
        raise ZeroMultiplicity(center, "P")
    if c.n_q == 0:
        raise ZeroMultiplicity(center, "Q")
    neighbors = g.neighbors(center)
    return RatioCheck(
        center=center,
        lhs=Fraction(sum(nb.n_p for nb in neighbors), c.n_p),
        rhs=Fraction(sum(nb.n_q for nb in neighbors), c.n_q),
        eligible=not any(nb.is_strict for nb in neighbors),
    )


def ratio_identity_sweep(g: ResolutionGraph) -> List[RatioCheck]:
    return [
        ratio_identity_check(g, c.id) for c in g.exceptional() if c.n_p != 0 and c.n_q != 0
    ]


@dataclass(frozen=True)
class BambooRatio:
    bamboo: Bamboo
    ratios: Tuple[Tuple[str, Optional[Fraction]], ...]
    applicable: bool

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        return len({r for _, r in self.ratios}) == 1

    @property
    def ratio(self) -> Optional[Fraction]:
        return self.ratios[0][1] if self.applicable and self.passed else None


def bamboo_ratio_constant(g: ResolutionGraph) -> List[BambooRatio]:
    """N^P/N^Q along every primitive bamboo, start vertex included"""
    result = []
    for bamboo in _maximal_bamboos(g):
        if not bamboo.primitive:
            continue
        comps = [g.component(cid) for cid in bamboo.vertices]
        applicable = all(c.n_q != 0 for c in comps)
        ratios = tuple(
            (c.id, Fraction(c.n_p, c.n_q) if c.n_q != 0 else None) for c in comps
        )
        entry = BambooRatio(bamboo=bamboo, ratios=ratios, applicable=applicable)
        if not entry.passed:
            logger.warning(f"Ratio not constant on bamboo off {bamboo.start}")
        result.append(entry)
    return result


# ---------------------------------------------------------------------------
# zero components and C_d
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroComponent:
    subgraph: SubgraphComponent
    value: str  # zero | infinity | finite | mixed
    meets_strict_p: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.value != "zero" or bool(self.meets_strict_p)


def zero_components(g: ResolutionGraph) -> List[ZeroComponent]:
    """Components of the exceptional locus minus the dicriticals, and where f sends them"""
    ids = [c.id for c in g.exceptional() if c.over_origin and not c.dicritical]
    result = []
    for sub in _subgraph_components(g, ids):
        signs = {(g.component(m).n > 0) - (g.component(m).n < 0) for m in sub.component_ids}
        if signs == {1}:
            value = "zero"
        elif signs == {-1}:
            value = "infinity"
        elif signs == {0}:
            value = "finite"
        else:
            value = "mixed"
        meets = None
        if value == "zero":
            meets = any(g.component(out).kind is Kind.STRICT_P for _, out in sub.boundary)
        entry = ZeroComponent(subgraph=sub, value=value, meets_strict_p=meets)
        if not entry.passed:
            logger.warning(f"Zero component {sub.sorted_ids} misses the strict transform of P")
        result.append(entry)
    return result


@dataclass(frozen=True)
class CdComponent:
    subgraph: SubgraphComponent
    euler_sum: int
    meets_only_dicriticals: bool  # every outside neighbor has N = 0
    branch_divisible: bool  # some strict P component has d | N
    claim_applies: bool

    @property
    def holds(self) -> bool:
        return self.euler_sum <= 0 or not self.claim_applies


def cd_components(g: ResolutionGraph, d: int) -> List[CdComponent]:
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    ids = [c.id for c in g.exceptional() if c.over_origin and c.n > 0 and c.n % d == 0]
    branch_divisible = any(c.n_p % d == 0 for c in g.strict(Kind.STRICT_P))
    result = []
    for sub in _subgraph_components(g, ids):
        euler = sum(2 - g.valence(m) for m in sub.component_ids)
        only_dicritical = all(g.component(out).n == 0 for _, out in sub.boundary)
        entry = CdComponent(
            subgraph=sub,
            euler_sum=euler,
            meets_only_dicriticals=only_dicritical,
            branch_divisible=branch_divisible,
            claim_applies=not (only_dicritical or branch_divisible),
        )
        if not entry.holds:
            logger.warning(f"C_{d} component {sub.sorted_ids} has Euler sum {euler} > 0")
        result.append(entry)
    return result


def divisors_of_multiplicities(g: ResolutionGraph) -> List[int]:
    """Every d dividing some N_k > 0 of an exceptional component"""
    values = {c.n for c in g.exceptional() if c.n > 0}
    return sorted({d for n in values for d in divisors(n)})
