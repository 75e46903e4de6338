"""
Pole certificates, residue contributions and alpha bounds

극점 판정은 항상 topo_zeta_local 의 약분된 분모를 기준으로 한다.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .errors import NoCertificate, NotAPole, NotExceptional, SharedCandidate, ZeroN
from .exactalg import Pole, rf_poles
from .resgraph import Component, Kind, ResolutionGraph, alpha_value, id_key
from .zeta import candidate_poles, topo_zeta_local

logger = logging.getLogger(__name__)

SCOPES = ("all", "holomorphicMinimal", "pSubgraph")


@dataclass(frozen=True)
class AlphaTable:
    """중심 성분과 이웃별 alpha 값"""

    center: str
    entries: Tuple[Tuple[str, Fraction], ...]  # (이웃 id, alpha)

    @property
    def total(self) -> Fraction:
        return sum((a for _, a in self.entries), Fraction(0))

    def __getitem__(self, neighbor: str) -> Fraction:
        for nb, a in self.entries:
            if nb == neighbor:
                return a
        raise KeyError(neighbor)


def _center(g: ResolutionGraph, center: str) -> Component:
    c = g.component(center)
    if not c.is_exceptional:
        raise NotExceptional(center)
    if c.n == 0:
        raise ZeroN(center)
    return c


def alpha_table(g: ResolutionGraph, center: str) -> AlphaTable:
    """
    alpha_i = nu_i - (nu / N) N_i 를 중심의 모든 이웃에 대해 계산

    Raises:
        NotExceptional: 중심이 strict transform 인 경우
        ZeroN: 중심이 dicritical (N = 0) 인 경우
    """
    c = _center(g, center)
    return AlphaTable(
        center=center, entries=tuple((nb.id, alpha_value(c, nb)) for nb in g.neighbors(center))
    )


def residue_contribution(g: ResolutionGraph, center: str) -> Fraction:
    """
    중심 성분이 후보 -nu/N 의 잔차(residue)에 주는 기여

    R = (1/N) (2 - k + sum 1/alpha_i), k 는 중심의 이웃 수.
    """
    c = _center(g, center)
    table = alpha_table(g, center)
    for nb, alpha in table.entries:
        if alpha == 0:
            # alpha_i = 0 exactly when nu_i/N_i = nu/N
            raise SharedCandidate(center, nb)
    k = len(table.entries)
    return Fraction(1, c.n) * (2 - k + sum((1 / a for _, a in table.entries), Fraction(0)))


def _poles(g: ResolutionGraph) -> List[Pole]:
    zeta = topo_zeta_local(g)
    return [] if zeta.is_zero else rf_poles(zeta)


def certificate_witnesses(g: ResolutionGraph, location: Fraction) -> List[str]:
    """
    극점 location 을 보증하는 성분 목록

    원점 위의 valence >= 3 예외 성분, 또는 N_P 로 -1/N_P 를 주는 P 의 strict transform.
    원점 밖에서 blowup 된 성분(over_origin=False)은 국소 zeta 에 기여하지 않으므로 제외한다.
    """
    witnesses = []
    for c in g.components:
        if c.is_local and c.n > 0 and g.valence(c.id) >= 3 and c.candidate == location:
            witnesses.append(c.id)
        elif c.kind is Kind.STRICT_P and Fraction(-1, c.n_p) == location:
            witnesses.append(c.id)
    return sorted(witnesses, key=id_key)


def veys_certificate(g: ResolutionGraph, pole: Fraction) -> List[str]:
    """
    극점을 보증하는 성분 목록 (Veys 판정)

    Raises:
        NotAPole: pole 이 약분된 분모의 근이 아닌 경우
        NoCertificate: 보증 성분이 하나도 없는 경우 (정리에 어긋나는 입력)
    """
    pole = Fraction(pole)
    if pole not in {p.location for p in _poles(g)}:
        raise NotAPole(f"{pole} is not a pole of the topological zeta function")
    witnesses = certificate_witnesses(g, pole)
    if not witnesses:
        logger.error(f"Pole {pole} has no certifying component")
        raise NoCertificate(f"no witness for pole {pole}")
    return witnesses


@dataclass(frozen=True)
class ConverseEntry:
    """역방향 감사의 후보 한 줄"""

    location: Fraction
    components: Tuple[str, ...]
    is_pole: bool


@dataclass
class ConverseAudit:
    """역방향 감사 결과"""

    entries: List[ConverseEntry]

    @property
    def failures(self) -> List[ConverseEntry]:
        return [e for e in self.entries if not e.is_pole]


def veys_converse_audit(g: ResolutionGraph) -> ConverseAudit:
    """
    역방향 감사: valence >= 3 국소 예외 성분이나 P 분기에서 나온 후보가 실제 극점인지 확인

    실패는 오류가 아니라 기록이다. 메로모픽 입력에서는 실제로 실패할 수 있다.
    """
    locations = {p.location for p in _poles(g)}
    entries = []
    for candidate in candidate_poles(g):
        sources = tuple(
            cid
            for cid in candidate.components
            if g.component(cid).is_strict
            or (g.component(cid).is_local and g.valence(cid) >= 3)
        )
        if sources:
            entries.append(
                ConverseEntry(
                    location=candidate.location,
                    components=sources,
                    is_pole=candidate.location in locations,
                )
            )
    audit = ConverseAudit(entries=entries)
    for e in audit.failures:
        logger.info(f"Candidate {e.location} from {', '.join(e.components)} is not a pole")
    return audit


@dataclass(frozen=True)
class AlphaEntry:
    """alpha 한계 감사의 (중심, 이웃) 한 쌍"""

    center: str
    neighbor: str
    alpha: Fraction
    center_valence: int
    status: str  # inside | boundary-minus-one | expected-unbounded | violation | informational

    @property
    def in_bounds(self) -> bool:
        return -1 < self.alpha < 1


@dataclass
class AlphaBoundsReport:
    """alpha 한계 감사 결과"""

    scope: str
    entries: List[AlphaEntry]
    subgraphs: List[Tuple[str, ...]] = field(default_factory=list)

    @property
    def violations(self) -> List[AlphaEntry]:
        return [e for e in self.entries if e.status == "violation"]

    @property
    def passed(self) -> bool:
        return not self.violations


def detect_p_subgraphs(g: ResolutionGraph) -> List[Tuple[Set[str], str, str]]:
    """
    P-부분그래프 탐지: 변 하나로 잘려 나가고 strict 성분 없이 N > 0 인 예외 성분만 가진 가지

    Returns:
        (구성원, 경계 꼭짓점, 경계 꼭짓점의 바깥 이웃) 목록
    """
    found = []
    seen = set()
    for a, b in g.edges:
        for outside, inside in ((a, b), (b, a)):
            inner = g.component(inside)
            if not (inner.is_exceptional and inner.n > 0):
                continue
            # 변 (outside, inside) 를 지운 그래프에서 inside 쪽 연결 성분
            view = nx.restricted_view(g.graph, [], [(outside, inside)])
            members = nx.node_connected_component(view, inside)
            key = frozenset(members)
            if key in seen:
                continue
            comps = [g.component(m) for m in members]
            seen.add(key)
            if all(c.is_exceptional and c.n > 0 for c in comps):
                found.append((set(members), inside, outside))
    found.sort(key=lambda item: sorted(id_key(m) for m in item[0]))
    return found


def _scope_entries(g: ResolutionGraph, holomorphic: bool) -> List[AlphaEntry]:
    """holomorphic 이면 범위 밖 값은 위반, 아니면 예상된 비유계로 기록"""
    entries = []
    for c in g.exceptional():
        if c.n == 0:
            continue
        valence = g.valence(c.id)
        for nb, alpha in alpha_table(g, c.id).entries:
            # 끝점은 alpha = -1 이 정상
            if valence == 1:
                ok = alpha == -1
                status = "boundary-minus-one" if ok else ("violation" if holomorphic else "expected-unbounded")
            elif -1 < alpha < 1:
                status = "inside"
            else:
                status = "violation" if holomorphic else "expected-unbounded"
            entries.append(
                AlphaEntry(center=c.id, neighbor=nb, alpha=alpha, center_valence=valence, status=status)
            )
    return entries


def alpha_bounds_audit(
    g: ResolutionGraph,
    scope: str = "all",
    subgraph: Optional[Sequence[str]] = None,
) -> AlphaBoundsReport:
    """
    최소 해상도에서 성립하는 alpha 한계 감사

    Args:
        g: 해상도 그래프
        scope: "all" (기록만), "holomorphicMinimal" (모든 성분 N^Q = 0),
            "pSubgraph" (f 가 항등적으로 0 인 부분그래프 안의 쌍)
        subgraph: P-부분그래프 구성원. 생략하면 detect_p_subgraphs 로 찾는다

    Raises:
        ValueError: 알 수 없는 scope, N^Q != 0 인 holomorphicMinimal, 경계 변이 하나가 아닌 subgraph
    """
    if scope not in SCOPES:
        raise ValueError(f"Unknown scope: {scope}")

    if scope == "all":
        return AlphaBoundsReport(scope=scope, entries=_scope_entries(g, holomorphic=False))

    if scope == "holomorphicMinimal":
        if any(c.n_q != 0 for c in g.components):
            raise ValueError("holomorphicMinimal scope needs NQ = 0 on every component")
        return AlphaBoundsReport(scope=scope, entries=_scope_entries(g, holomorphic=True))

    # pSubgraph: 명시된 부분그래프 또는 자동 탐지
    if subgraph is not None:
        members = set(subgraph)
        for m in members:
            g.component(m)
        boundary = [(m, o.id) for m in members for o in g.neighbors(m) if o.id not in members]
        if len(boundary) != 1:
            raise ValueError(f"subgraph must have exactly one boundary edge, found {len(boundary)}")
        candidates = [(members, boundary[0][0], boundary[0][1])]
    else:
        candidates = detect_p_subgraphs(g)

    entries = []
    for members, inside, outside in candidates:
        for ci in sorted(members, key=id_key):
            center = g.component(ci)
            for nb in g.neighbors(ci):
                if nb.id not in members:
                    continue
                # the bound needs the center to meet at least one more component
                if g.valence(ci) < 2:
                    continue
                alpha = alpha_value(center, nb)
                entries.append(
                    AlphaEntry(
                        center=ci,
                        neighbor=nb.id,
                        alpha=alpha,
                        center_valence=g.valence(ci),
                        status="inside" if -1 < alpha < 1 else "violation",
                    )
                )
        # 바깥 쌍은 한계가 보장되지 않으므로 참고용으로만 기록
        head = g.component(outside)
        if head.n != 0:
            alpha = alpha_value(head, g.component(inside))
            entries.append(
                AlphaEntry(
                    center=outside,
                    neighbor=inside,
                    alpha=alpha,
                    center_valence=g.valence(outside),
                    status="informational",
                )
            )
    return AlphaBoundsReport(
        scope=scope,
        entries=entries,
        subgraphs=[tuple(sorted(m, key=id_key)) for m, _, _ in candidates],
    )


def residue_table(g: ResolutionGraph, location: Fraction) -> Dict[str, Optional[Fraction]]:
    """
    location 을 후보로 주는 예외 성분별 잔차 기여

    이웃과 후보를 공유하면(alpha = 0) 기여를 정의할 수 없으므로 None.
    """
    table: Dict[str, Optional[Fraction]] = {}
    for c in g.exceptional():
        if c.candidate != location:
            continue
        try:
            table[c.id] = residue_contribution(g, c.id)
        except SharedCandidate:
            table[c.id] = None
    return table
