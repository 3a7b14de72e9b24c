"""Exception types shared across the package."""


class PolyFTError(Exception):
    """Base class for all polyft errors."""


class InvalidInput(PolyFTError):
    """Malformed or out-of-contract input."""


class NotCentrallySymmetric(InvalidInput):
    """Vertex set is not symmetric about the origin."""


class OriginNotInterior(InvalidInput):
    """The origin is not strictly inside the hull."""


class DegenerateDimension(InvalidInput):
    """Affine hull of the vertices has lower dimension than the space."""


class UnknownBall(InvalidInput):
    """Builtin ball name not recognized."""


class WrongDimension(InvalidInput):
    """Operation requires a different ambient dimension."""


class ZeroVector(InvalidInput):
    """The zero vector has no norming functional."""


class NotCollinear(InvalidInput):
    """Sites are not on one straight line."""


class CoincidentSite(InvalidInput):
    """Query point equals a site and the subdifferential extension is disabled."""


class NotNorming(InvalidInput):
    """Functional does not have dual norm one."""


class LPFailure(PolyFTError):
    """Numerical breakdown inside the simplex solver."""


class EmptyIntersection(PolyFTError):
    """Cone intersection came out empty; the certificate upstream is invalid."""


class UnboundedIntersection(PolyFTError):
    """Cone intersection is unbounded; numerical failure."""


class BudgetExceeded(PolyFTError):
    """Combinatorial enumeration exceeded its budget guard."""


class ConfirmationFailed(PolyFTError):
    """Grid oracle contradicts a claimed solution set."""


class CaseFailed(PolyFTError):
    """A scripted case study did not reproduce its expected classification."""
