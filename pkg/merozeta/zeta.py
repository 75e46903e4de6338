"""
Topological and monodromy zeta functions of a resolution graph

해상도 그래프의 수치 데이터(N^P, N^Q, nu, 인접 관계)만으로 계산한다.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Tuple

from sympy import divisors

from .exactalg import (
    CycloProduct,
    RationalFunction,
    RootOfUnity,
    cyclo_multiplicity_at,
    rf_sum_of_terms,
)
from .resgraph import Kind, ResolutionGraph, derive, id_key, invert_germ

logger = logging.getLogger(__name__)


def _zeta_terms(g: ResolutionGraph, local: bool) -> List[Tuple[int, List[Tuple[int, int]]]]:
    """
    Z_top 의 층(stratum)별 항 목록

    각 항은 (chi, [(N, nu), ...]) 형태이며 rf_sum_of_terms 에 그대로 넘긴다.
    I 가 S0 와 만나지 않는 층(N <= 0 인 성분만으로 된 층)은 정의에서 빠진다.
    """
    data = derive(g)
    terms = []

    # 단일 성분 층: chi(E_i°) / (N_i s + nu_i)
    for c in g.components:
        chi = data[c.id].chi_local if local else data[c.id].chi_global
        if chi != 0 and c.n > 0:
            terms.append((chi, [(c.n, c.nu)]))

    # 교점 층: 한쪽이라도 S0 에 있어야 한다
    for a, b in g.edges:
        ca, cb = g.component(a), g.component(b)
        if ca.n <= 0 and cb.n <= 0:
            continue
        chi = data.pair_chi_local(a, b) if local else data.pair_chi_global(a, b)
        if chi != 0:
            terms.append((chi, [(ca.n, ca.nu), (cb.n, cb.nu)]))
    return terms


def topo_zeta_local(g: ResolutionGraph) -> RationalFunction:
    """
    원점에서의 국소 topological zeta 함수

    Args:
        g: 검증된 해상도 그래프

    Returns:
        약분된 형태와 인수분해된 분모를 함께 가진 RationalFunction
    """
    terms = _zeta_terms(g, local=True)
    logger.debug(f"Local topological zeta from {len(terms)} strata")
    return rf_sum_of_terms(terms)


def topo_zeta_global(g: ResolutionGraph) -> RationalFunction:
    """전역 topological zeta 함수 (chi_global 사용)"""
    return rf_sum_of_terms(_zeta_terms(g, local=False))


def monodromy_zeta_origin(g: ResolutionGraph) -> CycloProduct:
    """
    원점의 monodromy zeta 함수

    S0 위의 곱 prod (1 - t^N)^chi_local. 같은 N 의 지수는 합쳐진다.
    """
    data = derive(g)
    exponents: Dict[int, int] = defaultdict(int)
    for c in g.components:
        chi = data[c.id].chi_local
        if c.n > 0 and chi != 0:
            exponents[c.n] += chi
    return CycloProduct.from_exponents(exponents)


def topo_zeta_at_infinity(g: ResolutionGraph) -> RationalFunction:
    """1/f 의 topological zeta 함수"""
    return topo_zeta_local(invert_germ(g))


def monodromy_zeta_at_infinity(g: ResolutionGraph) -> CycloProduct:
    return monodromy_zeta_origin(invert_germ(g))


@dataclass(frozen=True)
class EigenvalueOracle:
    """monodromy 고유값 판정기"""

    origin_zeta: CycloProduct
    branch_multiplicities: FrozenSet[int]  # P 의 각 분기 N^P

    def origin_multiplicity(self, xi: RootOfUnity) -> int:
        return cyclo_multiplicity_at(self.origin_zeta, xi)

    def branch_witness(self, xi: RootOfUnity) -> bool:
        # 분기 위의 점에서 monodromy 는 order N^P 의 회전
        return any(m % xi.order == 0 for m in self.branch_multiplicities)

    def is_eigenvalue(self, xi: RootOfUnity) -> bool:
        return self.origin_multiplicity(xi) != 0 or self.branch_witness(xi)


def eigenvalue_oracle(g: ResolutionGraph) -> EigenvalueOracle:
    return EigenvalueOracle(
        origin_zeta=monodromy_zeta_origin(g),
        branch_multiplicities=frozenset(c.n_p for c in g.strict(Kind.STRICT_P)),
    )


def monodromy_eigenvalues(g: ResolutionGraph) -> Dict[int, int]:
    """
    원점 monodromy zeta 에 나타나는 고유값

    Returns:
        order n -> 원시 n 차 단위근에서의 중복도 (0 인 것은 제외)
    """
    zeta = monodromy_zeta_origin(g)
    orders = sorted({d for a, _ in zeta.exponents for d in divisors(a)})
    result = {}
    for n in orders:
        m = cyclo_multiplicity_at(zeta, RootOfUnity.reduced(1, n))
        if m != 0:
            result[n] = m
    return result


@dataclass(frozen=True)
class Candidate:
    """후보 극점 -nu/N 과 그것을 주는 성분들"""

    location: Fraction
    components: Tuple[str, ...]


def candidate_poles(g: ResolutionGraph) -> List[Candidate]:
    """
    S0 성분별 후보 극점 -nu/N

    dicritical 성분(N = 0)과 Q 의 strict transform(N < 0)은 후보를 주지 않는다.
    """
    grouped: Dict[Fraction, List[str]] = defaultdict(list)
    for c in g.components:
        if c.candidate is not None:
            grouped[c.candidate].append(c.id)
    return [
        Candidate(location=loc, components=tuple(sorted(ids, key=id_key)))
        for loc, ids in sorted(grouped.items())
    ]
