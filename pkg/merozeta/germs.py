"""
Germ pairs P/Q: polynomial model, germ file format and value shifts
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple, Union

import sympy
from pydantic import ValidationError
from sympy import QQ, Poly

from .errors import NotAGermPair, NotCoprime
from .exactalg import as_rat, parse_rat, to_sympy
from .schemas import GermFile, GermTerm

logger = logging.getLogger(__name__)

X, Y = sympy.symbols("x y")

Term = Tuple[Fraction, int, int]  # (coefficient, degree in x, degree in y)


def poly_from_terms(terms: Iterable[Term]) -> Poly:
    collected: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for c, ex, ey in terms:
        collected[(ex, ey)] += parse_rat(c)
    nonzero = {k: to_sympy(v) for k, v in collected.items() if v != 0}
    if not nonzero:
        return Poly(0, X, Y, domain=QQ)
    return Poly.from_dict(nonzero, X, Y, domain=QQ)


def poly_terms(p: Poly) -> List[Term]:
    if p.is_zero:
        return []
    return sorted(((as_rat(c), ex, ey) for (ex, ey), c in p.terms()), key=lambda t: (t[1], t[2]))


def constant_term(p: Poly) -> Fraction:
    return as_rat(dict(p.terms()).get((0,) * len(p.gens), 0))


@dataclass(frozen=True)
class GermPair:
    """f = P/Q with P, Q in Q[x, y]"""

    p: Poly
    q: Poly

    @classmethod
    def from_terms(cls, p_terms: Iterable[Term], q_terms: Iterable[Term]) -> "GermPair":
        return cls(poly_from_terms(p_terms), poly_from_terms(q_terms))

    @classmethod
    def from_expr(cls, p, q) -> "GermPair":
        """Build from sympy expressions or strings in x, y"""
        return cls(
            Poly(sympy.sympify(p), X, Y, domain=QQ),
            Poly(sympy.sympify(q), X, Y, domain=QQ),
        )

    @property
    def is_holomorphic(self) -> bool:
        return self.q.is_ground

    def check(self) -> None:
        """Raise NotAGermPair unless P/Q is a meromorphic germ at the origin"""
        if self.p.is_zero:
            raise NotAGermPair("P is zero")
        if self.q.is_zero:
            raise NotAGermPair("Q is zero")
        if constant_term(self.p) != 0:
            raise NotAGermPair("P does not vanish at the origin")
        if not self.q.is_ground and constant_term(self.q) != 0:
            raise NotAGermPair("Q must vanish at the origin or be a nonzero constant")
        if self.p.gcd(self.q).total_degree() > 0:
            raise NotCoprime(f"P and Q share the factor {self.p.gcd(self.q).as_expr()}")

    def render(self) -> str:
        return f"P = {self.p.as_expr()}, Q = {self.q.as_expr()}"


def shift_value(germ: GermPair, a) -> GermPair:
    """(P - aQ, Q): the a-Milnor fibre of f is the 0-Milnor fibre of f - a"""
    a = parse_rat(a)
    if a == 0:
        raise ValueError("shift value must be nonzero")
    p = germ.p - germ.q.mul_ground(to_sympy(a))
    if p.gcd(germ.q).total_degree() > 0:
        raise NotCoprime(f"P - {a}Q shares a factor with Q")
    return GermPair(p, germ.q)


def germ_from_file(payload: GermFile) -> GermPair:
    return GermPair.from_terms(
        [(t.c, t.ex, t.ey) for t in payload.P], [(t.c, t.ex, t.ey) for t in payload.Q]
    )


def parse_germ(text: Union[str, bytes]) -> GermPair:
    try:
        payload = GermFile.model_validate_json(text)
    except ValidationError as e:
        raise NotAGermPair(f"malformed germ file: {e.errors()[0]['msg']}") from e
    return germ_from_file(payload)


def serialize_germ(germ: GermPair) -> str:
    """Canonical text: terms sorted by (ex, ey)"""
    payload = GermFile(
        P=[GermTerm(c=str(c), ex=ex, ey=ey) for c, ex, ey in poly_terms(germ.p)],
        Q=[GermTerm(c=str(c), ex=ex, ey=ey) for c, ex, ey in poly_terms(germ.q)],
    )
    return payload.model_dump_json(indent=2) + "\n"


# worked examples
EXAMPLES: Dict[str, Tuple[str, str]] = {
    "cusp_over_line": ("(y**2 - x**3)**2 - x*y**5", "x - y"),
    "example3": ("x**103 - y**24", "x**30 - y**7"),
    "cusp": ("y**2 - x**3", "1"),
    "lines": ("y", "x"),
}


def example_germ(name: str) -> GermPair:
    try:
        p, q = EXAMPLES[name]
    except KeyError:
        raise ValueError(f"Unknown example: {name}")
    return GermPair.from_expr(p, q)
