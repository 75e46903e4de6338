from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator

RAT_PATTERN = r"^-?\d+(/\d+)?$"


def _rat_text(value: Any) -> str:
    if isinstance(value, (Fraction, int)):
        return str(value)
    return value


# rationals travel as "p/q" strings
RatText = Annotated[str, BeforeValidator(_rat_text)]


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


class ComponentSchema(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    id: str = Field(min_length=1)
    kind: str = Field(pattern=r"^(exceptional|strict_P|strict_Q)$")
    NP: int = Field(ge=0)
    NQ: int = Field(ge=0)
    nu: int = Field(ge=1)
    self_intersection: Optional[int] = None
    dicritical: Optional[bool] = None
    over_origin: Optional[bool] = None


class GraphFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    components: List[ComponentSchema]
    edges: List[Tuple[str, str]]


class GermTerm(BaseModel):
    model_config = ConfigDict(extra="forbid")

    c: str = Field(pattern=RAT_PATTERN)
    ex: int = Field(ge=0)
    ey: int = Field(ge=0)

    @field_validator("c")
    @classmethod
    def validate_denominator(cls, v):
        if "/" in v and int(v.split("/")[1]) == 0:
            raise ValueError("zero denominator")
        return v


class GermFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    P: List[GermTerm]
    Q: List[GermTerm]


# ---------------------------------------------------------------------------
# report payloads
# ---------------------------------------------------------------------------


class RationalFunctionOut(BaseModel):
    numerator: List[RatText]
    factors: List[Tuple[int, int]]
    scalar: RatText
    text: str
    reduced: str


class PoleOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    location: RatText
    order: int
    leading_coefficient: RatText


class ZetaResponse(BaseModel):
    monodromy_zeta: Dict[str, int]
    monodromy_zeta_text: str
    topological_zeta: RationalFunctionOut
    global_zeta: Optional[RationalFunctionOut] = None
    poles: List[PoleOut]


class CandidateOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    location: RatText
    components: List[str]


class PoleRowOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    location: RatText
    is_pole: bool
    order: int
    leading_coefficient: Optional[RatText] = None
    components: List[str]
    witnesses: List[str]
    residues: Dict[str, Optional[RatText]]


class PolesResponse(BaseModel):
    rows: List[PoleRowOut]
    converse_failures: List[RatText]


class CertificateOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    kind: str
    component: Optional[str] = None
    multiplicity: Optional[int] = None


class PoleVerdictOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    pole: RatText
    root_k: int
    root_n: int
    verdict: str
    certificate: Optional[CertificateOut] = None


class ConjectureResponse(BaseModel):
    certified: bool
    per_pole: List[PoleVerdictOut]
    non_pole_candidates: List[RatText]


class RelationOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    component: str
    relation: int
    lhs: RatText
    rhs: RatText
    passed: bool


class ValidateResponse(BaseModel):
    passed: bool
    relations: List[RelationOut]
    warnings: List[str]


class AuditResponse(BaseModel):
    passed: bool
    sections: Dict[str, Any]


class ResolveResponse(BaseModel):
    graph: GraphFile
    exceptional: int
    completion_blowups: int


class HealthResponse(BaseModel):
    status: str
    version: str
