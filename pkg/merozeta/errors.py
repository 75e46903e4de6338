"""Exceptions raised by merozeta"""

from typing import Optional


class MerozetaError(ValueError):
    """Base class for all merozeta errors"""


class GraphSyntaxError(MerozetaError):
    """Graph file is not well-formed"""


class GraphSemanticsError(MerozetaError):
    def __init__(self, clause: str, detail: str):
        self.clause = clause
        self.detail = detail
        super().__init__(f"[{clause}] {detail}")


class UnknownComponent(MerozetaError):
    def __init__(self, component_id: str):
        self.component_id = component_id
        super().__init__(f"Unknown component: {component_id}")


class UnknownEdge(MerozetaError):
    def __init__(self, edge: tuple):
        self.edge = edge
        super().__init__(f"Unknown edge: {edge[0]} - {edge[1]}")


class NotExceptional(MerozetaError):
    def __init__(self, component_id: str):
        self.component_id = component_id
        super().__init__(f"Component {component_id} is not exceptional")


class ZeroN(MerozetaError):
    def __init__(self, component_id: str):
        self.component_id = component_id
        super().__init__(f"N = 0 at {component_id}")


class SharedCandidate(MerozetaError):
    def __init__(self, center: str, neighbor: str):
        self.center = center
        self.neighbor = neighbor
        super().__init__(f"{neighbor} shares the candidate pole of {center}")


class NoCertificate(MerozetaError):
    """A pole has no valence >= 3 or strict transform witness"""


class NotAPole(MerozetaError):
    """Requested location is not a pole of the topological zeta function"""


class ZeroMultiplicity(MerozetaError):
    def __init__(self, component_id: str, which: str):
        self.component_id = component_id
        super().__init__(f"N^{which} = 0 at {component_id}")


class NonLinearDenominator(MerozetaError):
    """Reduced denominator has a factor of degree > 1"""


class NonRationalCenter(MerozetaError):
    def __init__(self, detail: str, point: Optional[str] = None):
        self.point = point
        super().__init__(f"{detail} (at {point})" if point else detail)


class NotAGermPair(MerozetaError):
    """P, Q do not define a meromorphic germ at the origin"""


class NotCoprime(NotAGermPair):
    """P and Q share a factor"""


class InvalidCenter(MerozetaError):
    """Blowup requested at a point that does not need one"""


class BlowupLimitExceeded(MerozetaError):
    """Resolution needed more blowups than the configured limit"""
