"""
Embedded resolution engine for plane meromorphic germs over Q

Points are blown up in affine charts with exact arithmetic until the total
transform of PQ is a normal crossing divisor, then intersection points where
f is not a morphism to P^1 are blown up until P and Q are separated by
dicritical components.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

import sympy
from sympy import QQ, Poly

from .config import ResolveConfig
from .errors import BlowupLimitExceeded, InvalidCenter, NonRationalCenter
from .exactalg import as_rat, to_sympy
from .germs import GermPair, constant_term, shift_value
from .resgraph import Component, GraphBuilder, Kind, ResolutionGraph, check_graph

logger = logging.getLogger(__name__)

# 추적 중인 점의 국소 좌표
U, V = sympy.symbols("u v")

Terms = Dict[Tuple[int, int], sympy.Rational]


def _poly(terms: Terms) -> Poly:
    terms = {k: c for k, c in terms.items() if c != 0}
    if not terms:
        return Poly(0, U, V, domain=QQ)
    return Poly.from_dict(terms, U, V, domain=QQ)


def order_at_origin(f: Poly) -> int:
    """Multiplicity of the curve f = 0 at (0, 0)"""
    return min(i + j for i, j in f.monoms())


def chart_a(f: Poly, m: int) -> Poly:
    """f(u, uv) / u^m"""
    terms: Terms = defaultdict(lambda: sympy.Integer(0))
    for (i, j), c in f.terms():
        terms[(i + j - m, j)] += c
    return _poly(terms)


def chart_b(f: Poly, m: int) -> Poly:
    """f(uv, v) / v^m"""
    terms: Terms = defaultdict(lambda: sympy.Integer(0))
    for (i, j), c in f.terms():
        terms[(i, i + j - m)] += c
    return _poly(terms)


def shift_v(f: Poly, r: Fraction) -> Poly:
    """f(u, v + r)"""
    if r == 0:
        return f
    shift = to_sympy(r)
    terms: Terms = defaultdict(lambda: sympy.Integer(0))
    for (i, j), c in f.terms():
        for k in range(j + 1):
            terms[(i, k)] += c * comb(j, k) * shift ** (j - k)
    return _poly(terms)


def restrict_to_axis(f: Poly) -> Poly:
    """f(0, v) as a polynomial in v"""
    terms = {(j,): c for (i, j), c in f.terms() if i == 0}
    if not terms:
        return Poly(0, V, domain=QQ)
    return Poly.from_dict(terms, V, domain=QQ)


def linear_part(f: Poly) -> Tuple[Fraction, Fraction]:
    """원점에서의 gradient (u, v 계수)"""
    coeffs = dict(f.terms())
    return as_rat(coeffs.get((1, 0), 0)), as_rat(coeffs.get((0, 1), 0))


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GermFactor:
    """Square-free part of P or Q through the origin"""

    kind: Kind
    multiplicity: int  # exponent in P or Q
    poly: Poly  # in x, y


@dataclass(frozen=True)
class Curve:
    """점 근방에서 본 한 분기의 strict transform"""

    factor: int  # ChartState.factors 의 인덱스
    poly: Poly  # (u, v) 에서의 국소 방정식


@dataclass(frozen=True)
class LocalPoint:
    """A point of the current surface with the components {u = 0} and {v = 0} through it"""

    label: str
    axis_u: Optional[str]
    axis_v: Optional[str]
    curves: Tuple[Curve, ...]

    @property
    def carriers(self) -> Tuple[str, ...]:
        return tuple(a for a in (self.axis_u, self.axis_v) if a is not None)

    def is_normal_crossing(self) -> bool:
        """
        점에서 total transform 이 normal crossing 인지

        지나는 성분과 분기가 모두 매끄럽고, 합쳐서 둘 이하이며, 둘이면 횡단해야 한다.
        """
        # 좌표축으로 놓인 예외 성분의 gradient
        gradients: List[Tuple[Fraction, Fraction]] = []
        if self.axis_u is not None:
            gradients.append((Fraction(1), Fraction(0)))
        if self.axis_v is not None:
            gradients.append((Fraction(0), Fraction(1)))
        # 특이한 분기가 있으면 바로 실패
        for curve in self.curves:
            if order_at_origin(curve.poly) > 1:
                return False
            gradients.append(linear_part(curve.poly))
        if len(gradients) > 2:
            return False
        if len(gradients) == 2:
            (a, b), (c, d) = gradients
            return a * d - b * c != 0
        return True


@dataclass(frozen=True)
class BranchMark:
    """A strict branch meeting the exceptional locus transversally at a smooth point"""

    axis: Optional[str]
    factor: int
    count: int = 1  # conjugate irrational points


@dataclass(frozen=True)
class BlowupRecord:
    """blowup 이력 한 줄"""

    component: str
    point: str
    carriers: Tuple[str, ...]
    n_p: int
    n_q: int


@dataclass
class ChartState:
    """
    해상도 엔진의 작업 상태

    blowup_at_point 는 새 상태를 돌려주고 원래 상태는 건드리지 않는다.
    """

    factors: Tuple[GermFactor, ...]
    builder: GraphBuilder
    pending: List[LocalPoint] = field(default_factory=list)  # 아직 normal crossing 이 아닌 점
    marks: List[BranchMark] = field(default_factory=list)  # 분리된 분기의 위치
    history: List[BlowupRecord] = field(default_factory=list)
    graph: Optional[ResolutionGraph] = None  # set once strict branches are attached
    completion_blowups: int = 0

    def copy(self) -> "ChartState":
        return replace(
            self,
            builder=self.builder.copy(),
            pending=list(self.pending),
            marks=list(self.marks),
            history=list(self.history),
        )

    @property
    def blowups(self) -> int:
        return self.builder.exceptional_count


def germ_factors(germ: GermPair) -> Tuple[GermFactor, ...]:
    """P, Q 를 square-free 인수로 나누고 원점을 지나는 것만 남긴다"""
    factors = []
    for kind, poly in ((Kind.STRICT_P, germ.p), (Kind.STRICT_Q, germ.q)):
        if poly.is_ground:
            continue
        _, parts = poly.sqf_list()
        for part, multiplicity in parts:
            if constant_term(part) != 0:
                continue  # unit near the origin
            factors.append(GermFactor(kind=kind, multiplicity=multiplicity, poly=part))
    return tuple(factors)


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------


class ResolutionEngine:
    """
    해상도 엔진

    1. normal crossing 이 아닌 점을 차례로 blowup
    2. 원점에 분기가 둘 이상이면 한 번 blowup 해서 분리
    3. strict transform 부착
    4. N > 0 와 N < 0 가 만나는 교점을 dicritical 성분이 생길 때까지 blowup
    """

    def __init__(self, config: Optional[ResolveConfig] = None):
        self.config = config or ResolveConfig()

    def initial_state(self, germ: GermPair) -> ChartState:
        """
        원점 하나만 추적하는 초기 상태

        Raises:
            NotAGermPair, NotCoprime: 입력 검사 실패
        """
        germ.check()
        factors = germ_factors(germ)
        curves = tuple(
            Curve(factor=i, poly=_poly(dict(f.poly.terms()))) for i, f in enumerate(factors)
        )
        origin = LocalPoint(label="O", axis_u=None, axis_v=None, curves=curves)
        state = ChartState(factors=factors, builder=GraphBuilder())
        if origin.is_normal_crossing():
            state.marks.extend(BranchMark(axis=None, factor=c.factor) for c in curves)
        else:
            state.pending.append(origin)
        return state

    def normal_crossing_audit(self, state: ChartState) -> List[LocalPoint]:
        """total transform 이 normal crossing 이 아닌 추적 점 목록"""
        return [p for p in state.pending if not p.is_normal_crossing()]

    def blowup_at_point(self, state: ChartState, point: LocalPoint) -> ChartState:
        """
        추적 중인 점 하나를 blowup

        Raises:
            InvalidCenter: 추적 중이 아닌 점, 분기가 없는 점, 이미 normal crossing 인 점
            BlowupLimitExceeded: config.max_blowups 초과
            NonRationalCenter: 새 예외 성분 위에 무리수 좌표의 특이점이 생긴 경우
        """
        if point not in state.pending:
            raise InvalidCenter(f"{point.label} is not a tracked point of the total transform")
        if not point.curves:
            raise InvalidCenter(f"{point.label} lies off the strict transform")
        if point.is_normal_crossing():
            raise InvalidCenter(f"{point.label} is already normal crossing")
        return self._blow_up(state, point)

    def _blow_up(self, state: ChartState, point: LocalPoint) -> ChartState:
        state = state.copy()
        if point in state.pending:
            state.pending.remove(point)

        # 각 분기의 중복도가 새 성분의 N^P, N^Q 에 더해진다
        orders = [(curve, order_at_origin(curve.poly)) for curve in point.curves]
        extra = {Kind.STRICT_P: 0, Kind.STRICT_Q: 0}
        for curve, m in orders:
            factor = state.factors[curve.factor]
            extra[factor.kind] += factor.multiplicity * m

        # 그래프에 새 예외 성분 추가
        carriers = point.carriers
        new_id = state.builder.blowup(
            carriers, extra_np=extra[Kind.STRICT_P], extra_nq=extra[Kind.STRICT_Q]
        )
        created = state.builder.components[new_id]
        state.history.append(
            BlowupRecord(
                component=new_id,
                point=point.label,
                carriers=carriers,
                n_p=created.n_p,
                n_q=created.n_q,
            )
        )
        logger.debug(
            f"Blowup at {point.label} on {list(carriers)} created {new_id} "
            f"(NP={created.n_p}, NQ={created.n_q}, nu={created.nu})"
        )
        if state.blowups > self.config.max_blowups:
            raise BlowupLimitExceeded(f"more than {self.config.max_blowups} blowups")

        # 두 chart 에서 새 성분 위의 점 추적
        new_points = self._chart_a_points(state, point, new_id, orders)
        new_points.extend(self._chart_b_points(point, new_id, orders))
        for p in new_points:
            if p.is_normal_crossing():
                # E is one of the axes, so a good point carries exactly one branch
                state.marks.extend(BranchMark(axis=new_id, factor=c.factor) for c in p.curves)
            else:
                state.pending.append(p)
        return state

    def _chart_a_points(
        self,
        state: ChartState,
        point: LocalPoint,
        new_id: str,
        orders: List[Tuple[Curve, int]],
    ) -> List[LocalPoint]:
        """(u, v) -> (u, uv): E = {u = 0}, the old {v = 0} stays {v = 0}"""
        transformed = [(curve, chart_a(curve.poly, m)) for curve, m in orders]
        roots: Dict[Fraction, List[Curve]] = defaultdict(list)
        irrational: Dict[Tuple, List[Tuple[Curve, int, int]]] = defaultdict(list)

        # E 위의 교점: f(0, v) 의 유리근과 기약 인수
        for curve, f in transformed:
            _, parts = restrict_to_axis(f).factor_list()
            for h, e in parts:
                if h.degree() == 1:
                    a, b = h.all_coeffs()
                    roots[-as_rat(b) / as_rat(a)].append(Curve(curve.factor, f))
                else:
                    key = tuple(as_rat(c) for c in h.monic().all_coeffs())
                    irrational[key].append((curve, e, h.degree()))

        # 무리수 점은 매끄러운 단일 분기일 때만 켤레 개수만큼 기록
        for key, hits in irrational.items():
            if len(hits) > 1 or hits[0][1] > 1:
                raise NonRationalCenter(
                    f"singular point of the total transform at an irrational point of {new_id}",
                    point=point.label,
                )
            curve, _, degree = hits[0]
            state.marks.append(BranchMark(axis=new_id, factor=curve.factor, count=degree))

        points = []
        for r in sorted(roots):
            points.append(
                LocalPoint(
                    label=f"{point.label}.A({r})",
                    axis_u=new_id,
                    axis_v=point.axis_v if r == 0 else None,
                    curves=tuple(Curve(c.factor, shift_v(c.poly, r)) for c in roots[r]),
                )
            )
        return points

    def _chart_b_points(
        self, point: LocalPoint, new_id: str, orders: List[Tuple[Curve, int]]
    ) -> List[LocalPoint]:
        """(u, v) -> (uv, v): only the origin of this chart is new"""
        curves = []
        for curve, m in orders:
            f = chart_b(curve.poly, m)
            if constant_term(f) == 0:
                curves.append(Curve(curve.factor, f))
        if not curves:
            return []
        return [
            LocalPoint(
                label=f"{point.label}.B", axis_u=point.axis_u, axis_v=new_id, curves=tuple(curves)
            )
        ]

    def separate_origin(self, state: ChartState) -> ChartState:
        """Blow up a normal crossing origin that carries two branches"""
        if state.blowups > 0 or len(state.marks) < 2:
            return state
        curves = tuple(
            Curve(factor=m.factor, poly=_poly(dict(state.factors[m.factor].poly.terms())))
            for m in state.marks
        )
        origin = LocalPoint(label="O", axis_u=None, axis_v=None, curves=curves)
        state = state.copy()
        state.marks.clear()
        return self._blow_up(state, origin)

    def attach_branches(self, state: ChartState) -> ChartState:
        """분기와 예외 곡선의 교점마다 strict 성분 하나 (P1, P2, ..., Q1, ...)"""
        state = state.copy()
        builder = state.builder.copy()
        counters = {Kind.STRICT_P: 0, Kind.STRICT_Q: 0}
        for mark in state.marks:
            factor = state.factors[mark.factor]
            for _ in range(mark.count):
                counters[factor.kind] += 1
                prefix = "P" if factor.kind is Kind.STRICT_P else "Q"
                cid = f"{prefix}{counters[factor.kind]}"
                builder.add(
                    Component(
                        id=cid,
                        kind=factor.kind,
                        n_p=factor.multiplicity if factor.kind is Kind.STRICT_P else 0,
                        n_q=factor.multiplicity if factor.kind is Kind.STRICT_Q else 0,
                        nu=1,
                    )
                )
                if mark.axis is not None:
                    builder.connect(cid, mark.axis)
        state.graph = builder.freeze()
        return state

    def dicritical_completion(self, state: ChartState) -> ChartState:
        """
        N > 0 성분과 N < 0 성분의 교점이 없어질 때까지 blowup

        각 사슬은 N = 0 성분(dicritical)에 도달하면 끝난다.

        Raises:
            ValueError: normal crossing 이 아닌 점이 남아 있는 경우
            BlowupLimitExceeded: config.max_blowups 초과
        """
        if state.pending:
            raise ValueError(f"{len(state.pending)} points still fail normal crossing")
        if state.graph is None:
            state = self.attach_branches(state)
        state = state.copy()
        builder = GraphBuilder(state.graph)

        def oriented(a: str, b: str) -> Optional[Tuple[str, str]]:
            na, nb = builder.components[a].n, builder.components[b].n
            if na > 0 > nb:
                return (a, b)
            if nb > 0 > na:
                return (b, a)
            return None

        # 부호가 다른 교점 큐, 새 성분은 같은 사슬에서 바로 이어서 처리
        work = deque(e for e in (oriented(a, b) for a, b in builder.edges()) if e is not None)
        steps = 0
        created = []
        while work:
            positive, negative = work.popleft()
            over_origin = any(builder.components[c].is_local for c in (positive, negative))
            new_id = builder.blowup((positive, negative), over_origin=over_origin)
            steps += 1
            created.append(new_id)
            if state.blowups + steps > self.config.max_blowups:
                raise BlowupLimitExceeded(f"more than {self.config.max_blowups} blowups")
            n = builder.components[new_id].n
            logger.debug(f"Completion blowup on {positive} - {negative} created {new_id} (N={n})")
            if n > 0:
                work.appendleft((new_id, negative))
            elif n < 0:
                work.appendleft((positive, new_id))

        # 완성 과정의 성분은 모두 사슬 안에 있어야 한다
        for cid in created:
            if len(builder.adjacency[cid]) != 2:
                logger.warning(f"Completion component {cid} has valence {len(builder.adjacency[cid])}")

        state.builder = builder
        state.graph = builder.freeze()
        state.completion_blowups += steps
        return state

    def finalize(self, state: ChartState) -> ResolutionGraph:
        """
        dicritical 표시를 정하고 그래프를 검사

        N = 0 이고 서로 다른 값(영점, 극점, 유한값)을 가진 이웃이 둘 이상이면 dicritical.
        """
        graph = state.graph
        builder = GraphBuilder(graph)
        for c in graph.exceptional():
            values = set()
            for nb in graph.neighbors(c.id):
                values.add("zero" if nb.n > 0 else "pole" if nb.n < 0 else "finite")
            dicritical = c.n == 0 and len(values) >= 2
            if dicritical != c.dicritical:
                builder.update(replace(c, dicritical=dicritical))
        graph = builder.freeze()
        check_graph(graph, require_morphism=self.config.complete_dicriticals)
        return graph

    def run(self, germ: GermPair) -> ChartState:
        """전체 해상도, 이력과 blowup 횟수가 담긴 최종 상태"""
        state = self.initial_state(germ)

        # normal crossing 이 될 때까지
        while True:
            bad = self.normal_crossing_audit(state)
            if not bad:
                break
            state = self.blowup_at_point(state, bad[0])
        nc_blowups = state.blowups

        # 분기 분리, 부착, dicritical 완성
        state = self.attach_branches(self.separate_origin(state))
        if self.config.complete_dicriticals:
            state = self.dicritical_completion(state)
        state.graph = self.finalize(state)
        logger.info(
            f"Resolved {germ.render()}: {nc_blowups} normal crossing blowups, "
            f"{state.completion_blowups} completion blowups, {len(state.graph)} components"
        )
        return state

    def resolve(self, germ: GermPair) -> ResolutionGraph:
        return self.run(germ).graph


def resolve_meromorphic(germ: GermPair, config: Optional[ResolveConfig] = None) -> ResolutionGraph:
    """P/Q 의 해상도 그래프"""
    return ResolutionEngine(config).resolve(germ)


def resolve_at_value(germ: GermPair, a, config: Optional[ResolveConfig] = None) -> ResolutionGraph:
    """
    f - a 의 해상도

    원점 monodromy zeta 가 값 a 에서의 monodromy zeta 가 된다.

    Raises:
        ValueError: a = 0
        NotCoprime: P - aQ 와 Q 가 공통 인수를 가지는 경우
    """
    return ResolutionEngine(config).resolve(shift_value(germ, a))
