"""
Monodromy conjecture checker for plane meromorphic germs
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .errors import NotAPole
from .exactalg import RootOfUnity, rf_poles
from .poleanalysis import certificate_witnesses
from .resgraph import Kind, ResolutionGraph, id_key
from .structure import CdComponent, cd_components
from .zeta import candidate_poles, eigenvalue_oracle, topo_zeta_local

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    kind: str  # "branch" or "origin"
    component: Optional[str] = None
    multiplicity: Optional[int] = None

    @classmethod
    def branch_point(cls, component: str) -> "Certificate":
        return cls(kind="branch", component=component)

    @classmethod
    def origin(cls, multiplicity: int) -> "Certificate":
        return cls(kind="origin", multiplicity=multiplicity)


@dataclass(frozen=True)
class PoleVerdict:
    pole: Fraction
    root_of_unity: RootOfUnity
    certificate: Optional[Certificate]

    @property
    def verdict(self) -> str:
        return "certified" if self.certificate is not None else "violated"

    @property
    def root_k(self) -> int:
        return self.root_of_unity.k

    @property
    def root_n(self) -> int:
        return self.root_of_unity.n


@dataclass
class ConjectureReport:
    per_pole: List[PoleVerdict]
    non_pole_candidates: List[Fraction] = field(default_factory=list)

    @property
    def violations(self) -> List[PoleVerdict]:
        return [v for v in self.per_pole if v.certificate is None]

    @property
    def certified(self) -> bool:
        return not self.violations


def check_conjecture(g: ResolutionGraph) -> ConjectureReport:
    """Certify exp(2*pi*i*s0) as a monodromy eigenvalue for every pole s0"""
    zeta = topo_zeta_local(g)
    poles = [] if zeta.is_zero else rf_poles(zeta)
    oracle = eigenvalue_oracle(g)
    branches = sorted(g.strict(Kind.STRICT_P), key=lambda c: id_key(c.id))

    per_pole = []
    for pole in poles:
        xi = RootOfUnity.from_exponent(pole.location)
        d = xi.order
        certificate = None
        branch = next((c for c in branches if c.n_p % d == 0), None)
        if branch is not None:
            certificate = Certificate.branch_point(branch.id)
        else:
            m = oracle.origin_multiplicity(xi)
            if m != 0:
                certificate = Certificate.origin(m)
        if certificate is None:
            logger.error(f"Pole {pole.location} has no eigenvalue certificate")
        per_pole.append(PoleVerdict(pole=pole.location, root_of_unity=xi, certificate=certificate))

    locations = {p.location for p in poles}
    report = ConjectureReport(
        per_pole=per_pole,
        non_pole_candidates=[c.location for c in candidate_poles(g) if c.location not in locations],
    )
    logger.info(
        f"Checked {len(per_pole)} poles: {len(report.violations)} violations, "
        f"{len(report.non_pole_candidates)} candidates cancelled"
    )
    return report


@dataclass(frozen=True)
class ProofTrace:
    pole: Fraction
    d: int
    case: str  # branch | negative-sum | non-negative-sum
    witness: Optional[str]
    branch_components: List[str]
    component: Optional[CdComponent]
    euler_sum: Optional[int]
    origin_multiplicity: int


def proof_trace(g: ResolutionGraph, pole) -> ProofTrace:
    """
    극점 하나에 대해 C_d 논증을 따라간다

    - 분기 N_P 가 d 로 나누어지면 branch 경우
    - 아니면 witness 가 속한 C_d 성분의 Euler 합 부호로 경우를 나눈다
    """
    pole = Fraction(pole)
    zeta = topo_zeta_local(g)
    if zeta.is_zero or pole not in {p.location for p in rf_poles(zeta)}:
        raise NotAPole(f"{pole} is not a pole of the topological zeta function")

    xi = RootOfUnity.from_exponent(pole)
    d = xi.order
    origin_multiplicity = eigenvalue_oracle(g).origin_multiplicity(xi)
    branch_ids = sorted((c.id for c in g.strict(Kind.STRICT_P) if c.n_p % d == 0), key=id_key)
    witnesses = [w for w in certificate_witnesses(g, pole) if g.component(w).is_exceptional]

    # 예외 witness 를 포함하는 C_d 성분
    witness, component = None, None
    for w in witnesses:
        component = next((c for c in cd_components(g, d) if w in c.subgraph.component_ids), None)
        if component is not None:
            witness = w
            break

    if component is None:
        if witnesses:
            logger.warning(f"No C_{d} component holds the witnesses {witnesses} of pole {pole}")
        return ProofTrace(
            pole=pole,
            d=d,
            case="branch",
            witness=None,
            branch_components=branch_ids,
            component=None,
            euler_sum=None,
            origin_multiplicity=origin_multiplicity,
        )

    if branch_ids:
        case = "branch"
    elif component.euler_sum < 0:
        case = "negative-sum"
    else:
        case = "non-negative-sum"
    return ProofTrace(
        pole=pole,
        d=d,
        case=case,
        witness=witness,
        branch_components=branch_ids,
        component=component,
        euler_sum=component.euler_sum,
        origin_multiplicity=origin_multiplicity,
    )
