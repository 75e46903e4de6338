"""
Dual resolution graphs: data model, file format, derived data, validators and blowups
"""

import logging
import re
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
from pydantic import ValidationError

from .errors import GraphSemanticsError, GraphSyntaxError, UnknownComponent, UnknownEdge
from .schemas import ComponentSchema, GraphFile

logger = logging.getLogger(__name__)

_NUMBERED = re.compile(r"^(.*?)(\d+)$")
_EXCEPTIONAL_ID = re.compile(r"^E(\d+)$")


class Kind(str, Enum):
    """성분 종류"""

    EXCEPTIONAL = "exceptional"
    STRICT_P = "strict_P"
    STRICT_Q = "strict_Q"

    def swapped(self) -> "Kind":
        if self is Kind.STRICT_P:
            return Kind.STRICT_Q
        if self is Kind.STRICT_Q:
            return Kind.STRICT_P
        return self


@dataclass(frozen=True)
class Component:
    """해상도 그래프의 꼭짓점 하나 (예외 곡선 또는 strict transform)"""

    id: str
    kind: Kind
    n_p: int  # P 의 차수 N^P
    n_q: int  # Q 의 차수 N^Q
    nu: int  # 야코비안 차수 + 1
    self_intersection: Optional[int] = None  # 예외 성분만, 모르면 None
    dicritical: Optional[bool] = None  # 예외 성분만
    over_origin: bool = True  # False only for curves blown up away from the origin

    @property
    def n(self) -> int:
        """N = N^P - N^Q"""
        return self.n_p - self.n_q

    @property
    def is_exceptional(self) -> bool:
        return self.kind is Kind.EXCEPTIONAL

    @property
    def is_strict(self) -> bool:
        return self.kind is not Kind.EXCEPTIONAL

    @property
    def is_local(self) -> bool:
        return self.is_exceptional and self.over_origin

    @property
    def candidate(self) -> Optional[Fraction]:
        """-nu/N for components in S0"""
        return Fraction(-self.nu, self.n) if self.n > 0 else None


def id_key(component_id: str) -> Tuple[str, int, str]:
    """Natural ordering: E2 before E10"""
    match = _NUMBERED.match(component_id)
    if match:
        return (match.group(1), int(match.group(2)), component_id)
    return (component_id, -1, component_id)


def edge_key(a: str, b: str) -> Tuple[str, str]:
    return (a, b) if id_key(a) <= id_key(b) else (b, a)


def alpha_value(center: Component, neighbor: Component) -> Fraction:
    """alpha = nu_j - (nu / N) * N_j"""
    return neighbor.nu - Fraction(center.nu, center.n) * neighbor.n


class ResolutionGraph:
    """
    embedded resolution 의 불변 dual graph

    생성자는 id 중복, 알 수 없는 id, self-loop, 중복 변만 거른다.
    나머지 의미 조건은 check_graph 가 검사한다.
    """

    def __init__(self, components: Iterable[Component], edges: Iterable[Tuple[str, str]]):
        self._components: Dict[str, Component] = {}
        for component in components:
            if component.id in self._components:
                raise GraphSemanticsError("unique-ids", f"duplicate component id {component.id}")
            self._components[component.id] = component

        # 변은 (작은 id, 큰 id) 로 정규화해서 정렬 보관
        seen: Set[FrozenSet[str]] = set()
        ordered: List[Tuple[str, str]] = []
        for a, b in edges:
            for end in (a, b):
                if end not in self._components:
                    raise GraphSemanticsError("known-ids", f"edge {a} - {b} references unknown id {end}")
            if a == b:
                raise GraphSemanticsError("no-self-loop", f"self-loop at {a}")
            pair = frozenset((a, b))
            if pair in seen:
                raise GraphSemanticsError("simple", f"duplicate edge {a} - {b}")
            seen.add(pair)
            ordered.append(edge_key(a, b))
        self._edges: Tuple[Tuple[str, str], ...] = tuple(
            sorted(ordered, key=lambda e: (id_key(e[0]), id_key(e[1])))
        )
        self._pairs = frozenset(seen)

    @property
    def components(self) -> Tuple[Component, ...]:
        return tuple(self._components.values())

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        return self._edges

    @property
    def ids(self) -> List[str]:
        return list(self._components)

    def __contains__(self, component_id: str) -> bool:
        return component_id in self._components

    def __len__(self) -> int:
        return len(self._components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResolutionGraph):
            return NotImplemented
        return self._components == other._components and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash((frozenset(self._components.values()), self._pairs))

    def __repr__(self) -> str:
        return f"ResolutionGraph({len(self._components)} components, {len(self._edges)} edges)"

    def component(self, component_id: str) -> Component:
        try:
            return self._components[component_id]
        except KeyError:
            raise UnknownComponent(component_id)

    def has_edge(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._pairs

    @cached_property
    def graph(self) -> nx.Graph:
        """networkx 뷰 (연결성, 사이클, 동형 판정용)"""
        g = nx.Graph()
        for c in self._components.values():
            g.add_node(c.id, kind=c.kind.value, n_p=c.n_p, n_q=c.n_q, nu=c.nu, multiplicity=c.n)
        g.add_edges_from(self._edges)
        return g

    @cached_property
    def _order(self) -> Dict[str, int]:
        return {cid: i for i, cid in enumerate(self._components)}

    def neighbors(self, component_id: str) -> List[Component]:
        """이웃 성분, 입력 순서대로"""
        if component_id not in self._components:
            raise UnknownComponent(component_id)
        order = self._order
        return [
            self._components[n]
            for n in sorted(self.graph.neighbors(component_id), key=lambda n: order[n])
        ]

    def valence(self, component_id: str) -> int:
        # strict transform (arrowhead) 도 센다
        if component_id not in self._components:
            raise UnknownComponent(component_id)
        return self.graph.degree(component_id)

    def exceptional(self) -> List[Component]:
        return [c for c in self._components.values() if c.is_exceptional]

    def strict(self, kind: Optional[Kind] = None) -> List[Component]:
        return [
            c
            for c in self._components.values()
            if c.is_strict and (kind is None or c.kind is kind)
        ]

    @cached_property
    def has_local_exceptional(self) -> bool:
        return any(c.is_local for c in self._components.values())

    def replace_component(self, component: Component) -> "ResolutionGraph":
        """같은 id 의 성분을 바꾼 새 그래프"""
        if component.id not in self._components:
            raise UnknownComponent(component.id)
        components = [component if c.id == component.id else c for c in self.components]
        return ResolutionGraph(components, self._edges)


class GraphBuilder:
    """
    blowup 과 해상도 엔진이 쓰는 가변 작업 사본

    새 예외 성분은 지금까지 본 가장 큰 E 번호 다음 번호를 받는다.
    """

    def __init__(self, graph: Optional[ResolutionGraph] = None):
        self.components: Dict[str, Component] = {}
        self.adjacency: Dict[str, Set[str]] = {}
        self._last_exceptional = 0
        if graph is not None:
            for c in graph.components:
                self.add(c)
            for a, b in graph.edges:
                self.connect(a, b)

    def copy(self) -> "GraphBuilder":
        other = GraphBuilder()
        other.components = dict(self.components)
        other.adjacency = {cid: set(nbrs) for cid, nbrs in self.adjacency.items()}
        other._last_exceptional = self._last_exceptional
        return other

    @property
    def exceptional_count(self) -> int:
        return sum(1 for c in self.components.values() if c.is_exceptional)

    def add(self, component: Component) -> None:
        self.components[component.id] = component
        self.adjacency.setdefault(component.id, set())
        match = _EXCEPTIONAL_ID.match(component.id)
        if match:
            self._last_exceptional = max(self._last_exceptional, int(match.group(1)))

    def update(self, component: Component) -> None:
        self.components[component.id] = component

    def connect(self, a: str, b: str) -> None:
        self.adjacency[a].add(b)
        self.adjacency[b].add(a)

    def disconnect(self, a: str, b: str) -> None:
        self.adjacency[a].discard(b)
        self.adjacency[b].discard(a)

    def next_exceptional_id(self) -> str:
        return f"E{self._last_exceptional + 1}"

    def blowup(
        self,
        carriers: Sequence[str],
        extra_np: int = 0,
        extra_nq: int = 0,
        over_origin: bool = True,
    ) -> str:
        """
        주어진 성분들(최대 두 개) 위의 점을 blowup

        Args:
            carriers: 점을 지나는 성분. 두 개면 그 교점(satellite), 하나면 자유점
            extra_np, extra_nq: 성분이 아닌 곡선(아직 분리되지 않은 분기)의 기여
            over_origin: 새 예외 성분이 원점 위에 있는지

        Returns:
            새 예외 성분 id
        """
        if len(carriers) > 2:
            raise ValueError(f"a normal crossing point lies on at most two components: {carriers}")
        if len(carriers) == 2:
            a, b = carriers
            if b not in self.adjacency.get(a, ()):
                raise UnknownEdge((a, b))
            self.disconnect(a, b)

        # 차수는 지나는 성분들의 합, 성분이 아닌 좌표축은 nu 에 1 씩 더한다
        n_p = extra_np + sum(self.components[c].n_p for c in carriers)
        n_q = extra_nq + sum(self.components[c].n_q for c in carriers)
        nu = sum(self.components[c].nu for c in carriers) + (2 - len(carriers))

        # 지나는 예외 성분의 자기교차수는 1 줄어든다
        for c in carriers:
            carrier = self.components[c]
            if carrier.self_intersection is not None:
                self.update(replace(carrier, self_intersection=carrier.self_intersection - 1))

        new_id = self.next_exceptional_id()
        self.add(
            Component(
                id=new_id,
                kind=Kind.EXCEPTIONAL,
                n_p=n_p,
                n_q=n_q,
                nu=nu,
                self_intersection=-1,
                dicritical=False,
                over_origin=over_origin,
            )
        )
        for c in carriers:
            self.connect(new_id, c)
        return new_id

    def edges(self) -> List[Tuple[str, str]]:
        pairs = {edge_key(a, b) for a, nbrs in self.adjacency.items() for b in nbrs}
        return sorted(pairs, key=lambda e: (id_key(e[0]), id_key(e[1])))

    def freeze(self) -> ResolutionGraph:
        return ResolutionGraph(self.components.values(), self.edges())


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def _from_schema(item: ComponentSchema) -> Component:
    kind = Kind(item.kind)
    if kind is not Kind.EXCEPTIONAL and (
        item.self_intersection is not None
        or item.dicritical is not None
        or item.over_origin is not None
    ):
        raise GraphSemanticsError(
            "exceptional-only-fields",
            f"{item.id}: self_intersection/dicritical/over_origin only apply to exceptional components",
        )
    return Component(
        id=item.id,
        kind=kind,
        n_p=item.NP,
        n_q=item.NQ,
        nu=item.nu,
        self_intersection=item.self_intersection,
        dicritical=item.dicritical,
        over_origin=True if item.over_origin is None else item.over_origin,
    )


def _to_schema(c: Component) -> ComponentSchema:
    return ComponentSchema(
        id=c.id,
        kind=c.kind.value,
        NP=c.n_p,
        NQ=c.n_q,
        nu=c.nu,
        self_intersection=c.self_intersection,
        dicritical=c.dicritical,
        over_origin=None if c.over_origin else False,
    )


def graph_from_file(payload: GraphFile) -> ResolutionGraph:
    """파일 모델에서 그래프를 만들고 의미 조건까지 검사"""
    graph = ResolutionGraph([_from_schema(item) for item in payload.components], payload.edges)
    check_graph(graph)
    return graph


def graph_to_file(g: ResolutionGraph) -> GraphFile:
    components = sorted(g.components, key=lambda c: id_key(c.id))
    return GraphFile(components=[_to_schema(c) for c in components], edges=list(g.edges))


def parse_graph(text: Union[str, bytes]) -> ResolutionGraph:
    """Parse and validate a graph file"""
    try:
        payload = GraphFile.model_validate_json(text)
    except ValidationError as e:
        raise GraphSyntaxError(f"malformed graph file: {e.errors()[0]['msg']}") from e
    return graph_from_file(payload)


def serialize_graph(g: ResolutionGraph) -> str:
    """Canonical text: components by id, edges sorted"""
    return graph_to_file(g).model_dump_json(indent=2, exclude_none=True) + "\n"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _check_component(c: Component) -> None:
    if c.kind is Kind.STRICT_P and not (c.n_q == 0 and c.n_p >= 1 and c.nu == 1):
        raise GraphSemanticsError("strict-kind", f"{c.id}: strict_P needs NQ = 0, NP >= 1, nu = 1")
    if c.kind is Kind.STRICT_Q and not (c.n_p == 0 and c.n_q >= 1 and c.nu == 1):
        raise GraphSemanticsError("strict-kind", f"{c.id}: strict_Q needs NP = 0, NQ >= 1, nu = 1")
    if c.is_exceptional and c.nu < 2:
        raise GraphSemanticsError("exceptional-nu", f"{c.id}: exceptional components need nu >= 2")
    if c.is_strict and (c.self_intersection is not None or c.dicritical is not None or not c.over_origin):
        raise GraphSemanticsError(
            "exceptional-only-fields", f"{c.id}: field only allowed on exceptional components"
        )
    if c.dicritical and c.n_p != c.n_q:
        raise GraphSemanticsError("dicritical-balance", f"{c.id}: dicritical needs NP = NQ")
    if c.n_p < 0 or c.n_q < 0 or c.nu < 1:
        raise GraphSemanticsError("non-negative", f"{c.id}: negative numerical data")


def check_graph(g: ResolutionGraph, require_morphism: bool = True) -> None:
    """
    그래프 의미 조건 검사

    Args:
        g: 검사할 그래프
        require_morphism: False 면 N > 0 성분과 N < 0 성분 사이의 변을 허용

    Raises:
        GraphSemanticsError: 처음 어긋난 조건의 이름(clause)과 함께
    """
    if len(g) == 0:
        raise GraphSemanticsError("nonempty", "graph has no components")
    # 성분 단위 조건
    for c in g.components:
        _check_component(c)

    # 그래프 단위 조건
    if not nx.is_connected(g.graph):
        raise GraphSemanticsError("connected", "graph is not connected")
    if not nx.is_forest(g.graph):
        cycle = [a for a, _ in nx.find_cycle(g.graph)]
        raise GraphSemanticsError("acyclic", f"cycle through {' - '.join(cycle)}")

    for a, b in g.edges:
        ca, cb = g.component(a), g.component(b)
        if ca.is_strict and cb.is_strict:
            raise GraphSemanticsError("strict-strict-edge", f"edge {a} - {b} joins two strict components")
        if require_morphism and ca.n * cb.n < 0:
            raise GraphSemanticsError(
                "morphism", f"edge {a} - {b} joins N = {ca.n} and N = {cb.n}; f is not a morphism there"
            )


# ---------------------------------------------------------------------------
# derived data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentData:
    """성분 하나의 파생 데이터"""

    id: str
    n: int
    valence: int
    chi_local: int
    chi_global: int
    in_s0: bool


@dataclass(frozen=True)
class DerivedData:
    components: Dict[str, ComponentData]
    edges: FrozenSet[FrozenSet[str]]
    local_edges: FrozenSet[FrozenSet[str]]

    def __getitem__(self, component_id: str) -> ComponentData:
        try:
            return self.components[component_id]
        except KeyError:
            raise UnknownComponent(component_id)

    def pair_chi_local(self, a: str, b: str) -> int:
        return 1 if frozenset((a, b)) in self.local_edges else 0

    def pair_chi_global(self, a: str, b: str) -> int:
        return 1 if frozenset((a, b)) in self.edges else 0


def derive(g: ResolutionGraph) -> DerivedData:
    """
    valence, chi_local, chi_global, S0 소속 계산

    - 예외 성분: chi = 2 - valence, 원점 밖이면 chi_local = 0
    - strict transform: 원점 근방의 원판이므로 chi = 1 - valence,
      예외 성분이 있으면 원점에 닿지 않아 chi_local = 0
    - 교점 쌍: 한쪽이 원점 위 예외 성분일 때만 국소 교점
    """
    has_exceptional = bool(g.exceptional())
    data = {}
    for c in g.components:
        valence = g.valence(c.id)
        if c.is_exceptional:
            chi_global = 2 - valence
            chi_local = chi_global if c.over_origin else 0
        else:
            chi_global = 1 - valence
            chi_local = 0 if has_exceptional else 1
        data[c.id] = ComponentData(
            id=c.id,
            n=c.n,
            valence=valence,
            chi_local=chi_local,
            chi_global=chi_global,
            in_s0=c.n > 0,
        )
    edges = frozenset(frozenset(e) for e in g.edges)
    local_edges = frozenset(
        frozenset((a, b)) for a, b in g.edges if g.component(a).is_local or g.component(b).is_local
    )
    return DerivedData(components=data, edges=edges, local_edges=local_edges)


@dataclass(frozen=True)
class RelationCheck:
    """선형 관계식 검사 한 건"""

    component: str
    relation: int  # 1: sum N_i = (-E.E) N, 2: sum alpha_i = k - 2
    lhs: Fraction
    rhs: Fraction

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


@dataclass
class RelationReport:
    """관계식 검사 결과"""

    checks: List[RelationCheck]
    warnings: List[str]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[RelationCheck]:
        return [c for c in self.checks if not c.passed]

    def failed_components(self, relation: Optional[int] = None) -> Set[str]:
        return {c.component for c in self.failures if relation is None or c.relation == relation}


def validate_relations(g: ResolutionGraph) -> RelationReport:
    """
    N != 0 인 예외 성분마다 두 관계식을 검사

    1. sum N_i = -E.E * N  (자기교차수가 있을 때만)
    2. sum alpha_i = k - 2

    N = 0 인데 dicritical 표시가 없고 영점/극점 양쪽과 만나면 경고만 남긴다.
    """
    checks: List[RelationCheck] = []
    warnings: List[str] = []
    for c in g.exceptional():
        neighbors = g.neighbors(c.id)
        if c.n != 0:
            if c.self_intersection is not None:
                checks.append(
                    RelationCheck(
                        component=c.id,
                        relation=1,
                        lhs=Fraction(sum(nb.n for nb in neighbors)),
                        rhs=Fraction(-c.self_intersection * c.n),
                    )
                )
            checks.append(
                RelationCheck(
                    component=c.id,
                    relation=2,
                    lhs=sum((alpha_value(c, nb) for nb in neighbors), Fraction(0)),
                    rhs=Fraction(len(neighbors) - 2),
                )
            )
        # 표시되지 않은 dicritical 후보
        elif c.n_p == c.n_q and c.dicritical is not True:
            signs = {(nb.n > 0) - (nb.n < 0) for nb in neighbors}
            if 1 in signs and -1 in signs:
                warnings.append(f"{c.id} meets both zeros and poles of f but is not flagged dicritical")

    for check in checks:
        if not check.passed:
            logger.warning(
                f"Relation ({check.relation}) fails at {check.component}: {check.lhs} != {check.rhs}"
            )
    return RelationReport(checks=checks, warnings=warnings)


# ---------------------------------------------------------------------------
# graph level operations
# ---------------------------------------------------------------------------


def blowup_free(g: ResolutionGraph, on_component: str) -> ResolutionGraph:
    """
    성분 위의 자유점(다른 성분과 만나지 않는 점)을 blowup

    Raises:
        UnknownComponent: on_component 가 그래프에 없는 경우
    """
    carrier = g.component(on_component)
    if carrier.is_strict:
        # a point of a strict branch away from the exceptional locus lies over the origin
        # only while nothing has been blown up there
        over_origin = not g.has_local_exceptional
    else:
        over_origin = carrier.is_local
    builder = GraphBuilder(g)
    new_id = builder.blowup((on_component,), over_origin=over_origin)
    logger.debug(f"Free blowup on {on_component} created {new_id}")
    return builder.freeze()


def blowup_satellite(g: ResolutionGraph, edge: Tuple[str, str]) -> ResolutionGraph:
    """
    인접한 두 성분의 교점을 blowup

    Raises:
        UnknownEdge: 두 성분이 인접하지 않은 경우
    """
    a, b = edge
    if a not in g or b not in g or not g.has_edge(a, b):
        raise UnknownEdge(edge)
    over_origin = g.component(a).is_local or g.component(b).is_local
    builder = GraphBuilder(g)
    new_id = builder.blowup((a, b), over_origin=over_origin)
    logger.debug(f"Satellite blowup on {a} - {b} created {new_id}")
    return builder.freeze()


def invert_germ(g: ResolutionGraph) -> ResolutionGraph:
    """1/f 의 그래프: N^P 와 N^Q, strict 종류를 맞바꾼다 (involution)"""
    components = [replace(c, n_p=c.n_q, n_q=c.n_p, kind=c.kind.swapped()) for c in g.components]
    return ResolutionGraph(components, g.edges)


def isomorphic(g1: ResolutionGraph, g2: ResolutionGraph) -> bool:
    """종류와 수치 데이터를 보존하는 그래프 동형 (id 이름은 무시)"""
    return nx.is_isomorphic(
        g1.graph,
        g2.graph,
        node_match=lambda x, y: (x["kind"], x["n_p"], x["n_q"], x["nu"])
        == (y["kind"], y["n_p"], y["n_q"], y["nu"]),
    )
