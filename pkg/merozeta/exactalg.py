"""
Exact arithmetic kernel: rationals, polynomials in s, rational functions, cyclotomic products
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy import QQ, Poly

from .errors import NonLinearDenominator

logger = logging.getLogger(__name__)

S = sympy.Symbol("s")

Rat = Fraction
# (N, nu) stands for the linear form N*s + nu
LinearFactor = Tuple[int, int]

SAMPLE_POINTS = (Fraction(0), Fraction(1), Fraction(-2))
FALLBACK_POINTS = (Fraction(3), Fraction(-3), Fraction(1, 2), Fraction(5), Fraction(-7, 3))


def parse_rat(value) -> Fraction:
    """Parse "p/q", "p", int or Fraction into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value).strip())


def as_rat(value) -> Fraction:
    """Convert a sympy rational (or int/Fraction) to Fraction"""
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


def to_sympy(value: Fraction) -> sympy.Rational:
    value = parse_rat(value)
    return sympy.Rational(value.numerator, value.denominator)


def poly_from_coeffs(coeffs: Sequence, var: sympy.Symbol = S) -> Poly:
    """Build a polynomial from coefficients indexed by degree"""
    dense = [to_sympy(parse_rat(c)) for c in reversed(list(coeffs))]
    if not dense:
        return Poly(0, var, domain=QQ)
    return Poly(dense, var, domain=QQ)


def coeffs_of(p: Poly) -> List[Fraction]:
    """Coefficients indexed by degree, trailing zeros trimmed"""
    if p.is_zero:
        return []
    return [as_rat(c) for c in reversed(p.all_coeffs())]


def evaluate(p: Poly, at: Fraction) -> Fraction:
    return as_rat(p.eval(to_sympy(at)))


def linear_poly(factor: LinearFactor) -> Poly:
    n, nu = factor
    return Poly(n * S + nu, S, domain=QQ)


def primitive_line(n: int, nu: int) -> Tuple[LinearFactor, Fraction]:
    """Write n*s + nu = c * (a*s + b) with gcd(a, b) = 1 and a > 0"""
    g = gcd(abs(n), abs(nu))
    a, b = n // g, nu // g
    if a < 0:
        a, b, g = -a, -b, -g
    return (a, b), Fraction(g)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals"""
    if a.is_zero and b.is_zero:
        raise ValueError("gcd of two zero polynomials is undefined")
    g = a.gcd(b)
    return g.monic() if not g.is_zero else g


def poly_text(coeffs: Sequence, var: str = "s") -> str:
    """Render coefficients (indexed by degree) highest degree first"""
    parts: List[str] = []
    for degree in range(len(coeffs) - 1, -1, -1):
        c = parse_rat(coeffs[degree])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        if degree == 0:
            body = str(magnitude)
        else:
            power = var if degree == 1 else f"{var}^{degree}"
            if magnitude == 1:
                body = power
            elif magnitude.denominator == 1:
                body = f"{magnitude}{power}"
            else:
                body = f"({magnitude}){power}"
        parts.append(f"{sign}{body}")
    if not parts:
        return "0"
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def factor_text(factor: LinearFactor) -> str:
    n, nu = factor
    head = "s" if n == 1 else f"{n}s"
    if nu == 0:
        return head
    return f"({head}{'+' if nu > 0 else '-'}{abs(nu)})"


@dataclass(frozen=True)
class Pole:
    location: Fraction
    order: int
    leading_coefficient: Fraction


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """
    numerator / (scalar * prod(N*s + nu)) over the surviving factors, kept
    next to the reduced pair with monic denominator
    """

    numerator: Poly
    denominator_factors: Tuple[LinearFactor, ...]
    scalar: Fraction
    reduced_numerator: Poly
    reduced_denominator: Poly
    candidate_factors: Tuple[LinearFactor, ...] = ()

    def __post_init__(self):
        if not self.reduced_denominator.is_zero and self.reduced_denominator.LC() != 1:
            raise ValueError("reduced denominator must be monic")
        self._self_check()

    @classmethod
    def zero(cls, candidates: Sequence[LinearFactor] = ()) -> "RationalFunction":
        zero = Poly(0, S, domain=QQ)
        one = Poly(1, S, domain=QQ)
        return cls(zero, (), Fraction(1), zero, one, tuple(candidates))

    @classmethod
    def from_parts(
        cls,
        numerator: Poly,
        lines: Mapping[LinearFactor, int],
        candidates: Sequence[LinearFactor] = (),
    ) -> "RationalFunction":
        """Reduce numerator / prod(line ** mult) for primitive lines"""
        if numerator.is_zero:
            return cls.zero(candidates)

        denominator = Poly(1, S, domain=QQ)
        for line in sorted(lines):
            denominator = denominator * linear_poly(line) ** lines[line]

        common = poly_gcd(numerator, denominator)
        reduced_num = numerator.exquo(common)
        reduced_den = denominator.exquo(common)
        lead = reduced_den.LC()
        reduced_num = reduced_num.quo_ground(lead)
        reduced_den = reduced_den.monic()

        surviving: List[LinearFactor] = []
        product = Poly(1, S, domain=QQ)
        for line in sorted(lines):
            remaining = reduced_den
            line_poly = linear_poly(line)
            while remaining.degree() > 0:
                quotient, remainder = remaining.div(line_poly)
                if not remainder.is_zero:
                    break
                remaining = quotient
                surviving.append(line)
                product = product * line_poly

        # numerator over the factored denominator, as a primitive integer polynomial
        scaled = reduced_num.mul_ground(product.LC())
        denominators, integral = scaled.clear_denoms(convert=True)
        content, primitive = integral.primitive()
        content = as_rat(content)
        if primitive.LC() < 0:
            primitive = -primitive
            content = -content
        scalar = as_rat(denominators) / content

        return cls(
            numerator=primitive.set_domain(QQ),
            denominator_factors=tuple(surviving),
            scalar=scalar,
            reduced_numerator=reduced_num,
            reduced_denominator=reduced_den,
            candidate_factors=tuple(candidates),
        )

    @classmethod
    def from_factored(
        cls, numerator: Sequence, factors: Sequence[LinearFactor], scalar=1
    ) -> "RationalFunction":
        """Inverse of to_payload"""
        lines: Counter = Counter()
        constant = parse_rat(scalar)
        for n, nu in factors:
            if n == 0:
                constant *= nu
                continue
            line, c = primitive_line(n, nu)
            constant *= c
            lines[line] += 1
        num = poly_from_coeffs(numerator).quo_ground(to_sympy(constant))
        return cls.from_parts(num, lines, tuple(sorted(lines)))

    @property
    def is_zero(self) -> bool:
        return self.reduced_numerator.is_zero

    def evaluate(self, at) -> Fraction:
        at = parse_rat(at)
        den = evaluate(self.reduced_denominator, at)
        if den == 0:
            raise ZeroDivisionError(f"pole at s = {at}")
        return evaluate(self.reduced_numerator, at) / den

    def evaluate_factored(self, at) -> Fraction:
        at = parse_rat(at)
        den = self.scalar
        for n, nu in self.denominator_factors:
            den *= n * at + nu
        if den == 0:
            raise ZeroDivisionError(f"pole at s = {at}")
        return evaluate(self.numerator, at) / den

    def _self_check(self) -> None:
        checked = 0
        for at in SAMPLE_POINTS + FALLBACK_POINTS:
            if checked == 3:
                break
            if evaluate(self.reduced_denominator, at) == 0:
                continue
            if self.evaluate(at) != self.evaluate_factored(at):
                logger.error(f"Factored and reduced forms disagree at s = {at}")
                raise ArithmeticError(f"factored and reduced forms disagree at s = {at}")
            checked += 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (
            self.reduced_numerator == other.reduced_numerator
            and self.reduced_denominator == other.reduced_denominator
        )

    def __hash__(self) -> int:
        return hash((tuple(coeffs_of(self.reduced_numerator)), tuple(coeffs_of(self.reduced_denominator))))

    def candidate_locations(self) -> List[Fraction]:
        return sorted({Fraction(-nu, n) for n, nu in self.candidate_factors if n != 0})

    def render(self) -> str:
        """Factored form, e.g. (20s^2+33s+12)/(15(s+1)(2s+1)^2)"""
        if self.is_zero:
            return "0"
        sign = "-" if self.scalar < 0 else ""
        scalar = abs(self.scalar)
        top = poly_text([c * scalar.denominator for c in coeffs_of(self.numerator)])
        counts = Counter(self.denominator_factors)
        bottom = ""
        for line in sorted(counts, key=lambda f: (Fraction(-f[1], f[0]), f)):
            text = factor_text(line)
            if not text.startswith("("):
                text = f"({text})"
            bottom += text if counts[line] == 1 else f"{text}^{counts[line]}"
        if scalar.numerator != 1:
            bottom = f"{scalar.numerator}{bottom}"
        if self.numerator.degree() > 0:
            top = f"({top})"
        if not bottom:
            return f"{sign}{top}"
        if len(counts) == 1 and sum(counts.values()) == 1 and scalar.numerator == 1:
            return f"{sign}{top}/{bottom}"
        return f"{sign}{top}/({bottom})"

    def render_reduced(self) -> str:
        """Reduced form with integer coefficients, denominator expanded"""
        if self.is_zero:
            return "0"
        den_lcm, num = self.reduced_numerator.clear_denoms()
        den = self.reduced_denominator.mul_ground(den_lcm)
        top = poly_text(coeffs_of(num))
        bottom = poly_text(coeffs_of(den))
        if den.degree() == 0 and as_rat(den.LC()) == 1:
            return top
        return f"({top})/({bottom})"

    def to_payload(self) -> Dict:
        return {
            "numerator": [str(c) for c in coeffs_of(self.numerator)],
            "factors": [list(f) for f in self.denominator_factors],
            "scalar": str(self.scalar),
        }


def rf_sum_of_terms(terms: Iterable[Tuple[int, Sequence[LinearFactor]]]) -> RationalFunction:
    """Exact sum of coefficient / prod(N*s + nu) terms over a common denominator"""
    prepared: List[Tuple[Fraction, Counter]] = []
    common: Dict[LinearFactor, int] = {}
    candidates = set()

    for coefficient, factors in terms:
        constant = Fraction(coefficient)
        lines: Counter = Counter()
        for n, nu in factors:
            if nu < 1:
                raise ValueError(f"nu must be positive, got {nu}")
            if n == 0:
                constant /= nu
                continue
            line, c = primitive_line(n, nu)
            constant /= c
            lines[line] += 1
            candidates.add(line)
        for line, mult in lines.items():
            common[line] = max(common.get(line, 0), mult)
        prepared.append((constant, lines))

    numerator = Poly(0, S, domain=QQ)
    for constant, lines in prepared:
        if constant == 0:
            continue
        term = Poly(to_sympy(constant), S, domain=QQ)
        for line, mult in common.items():
            missing = mult - lines.get(line, 0)
            if missing:
                term = term * linear_poly(line) ** missing
        numerator = numerator + term

    result = RationalFunction.from_parts(numerator, common, tuple(sorted(candidates)))
    logger.debug(f"Summed {len(prepared)} terms into {result.render()}")
    return result


def rf_poles(f: RationalFunction) -> List[Pole]:
    """Poles with order and leading Laurent coefficient, ascending"""
    if f.is_zero:
        raise ValueError("the zero function has no pole set")
    den = f.reduced_denominator
    if den.degree() <= 0:
        return []

    poles = []
    _, factors = den.factor_list()
    for factor, mult in factors:
        if factor.degree() != 1:
            raise NonLinearDenominator(f"irreducible factor {factor.as_expr()} of degree > 1")
        a, b = (as_rat(c) for c in factor.all_coeffs())
        location = -b / a
        cofactor = den.exquo(Poly(S - to_sympy(location), S, domain=QQ) ** mult)
        leading = evaluate(f.reduced_numerator, location) / evaluate(cofactor, location)
        poles.append(Pole(location=location, order=mult, leading_coefficient=leading))
    return sorted(poles, key=lambda p: p.location)


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i*k/n), stored reduced so n is the exact order"""

    k: int
    n: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.k < self.n or gcd(self.k, self.n) != 1:
            raise ValueError(f"({self.k}, {self.n}) is not a reduced root of unity")

    @classmethod
    def reduced(cls, k: int, n: int) -> "RootOfUnity":
        if n < 1:
            raise ValueError(f"order must be positive, got {n}")
        k %= n
        g = gcd(k, n)
        return cls(k // g, n // g)

    @classmethod
    def from_exponent(cls, s0: Fraction) -> "RootOfUnity":
        """exp(2*pi*i*s0)"""
        s0 = parse_rat(s0)
        return cls.reduced(s0.numerator, s0.denominator)

    @property
    def order(self) -> int:
        return self.n

    def render(self) -> str:
        if self.n == 1:
            return "1"
        if self.n == 2:
            return "-1"
        return f"exp(2πi·{self.k}/{self.n})"


@dataclass(frozen=True)
class CycloProduct:
    """prod over a of (1 - t^a)^e_a"""

    exponents: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for a, e in self.exponents:
            if a < 1 or e == 0:
                raise ValueError(f"invalid factor (1-t^{a})^{e}")

    @classmethod
    def from_exponents(cls, exponents: Mapping[int, int]) -> "CycloProduct":
        return cls(tuple(sorted((a, e) for a, e in exponents.items() if e != 0)))

    @property
    def as_dict(self) -> Dict[int, int]:
        return dict(self.exponents)

    @property
    def is_one(self) -> bool:
        return not self.exponents

    def degree(self) -> int:
        return sum(a * e for a, e in self.exponents)

    def render(self) -> str:
        def piece(a: int, e: int) -> str:
            base = f"(1-t^{a})" if a != 1 else "(1-t)"
            return base if e == 1 else f"{base}^{e}"

        top = "".join(piece(a, e) for a, e in self.exponents if e > 0) or "1"
        down = [(a, -e) for a, e in self.exponents if e < 0]
        if not down:
            return top
        bottom = "".join(piece(a, e) for a, e in down)
        if len(down) > 1 or down[0][1] != 1:
            bottom = f"({bottom})"
        return f"{top}/{bottom}"

    def to_payload(self) -> Dict[str, int]:
        return {str(a): e for a, e in self.exponents}


def cyclo_multiplicity_at(z: CycloProduct, xi: RootOfUnity) -> int:
    """Zero (> 0) or pole (< 0) multiplicity of z at xi"""
    return sum(e for a, e in z.exponents if a % xi.order == 0)


def roots_of_unity_of_poles(f: RationalFunction) -> List[Tuple[Fraction, RootOfUnity]]:
    if f.is_zero:
        return []
    return [(p.location, RootOfUnity.from_exponent(p.location)) for p in rf_poles(f)]


def parse_cyclo(payload: Optional[Mapping]) -> CycloProduct:
    return CycloProduct.from_exponents({int(a): int(e) for a, e in (payload or {}).items()})
