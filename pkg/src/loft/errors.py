"""Exception hierarchy.  Each family maps to a distinct CLI exit code."""


class LoftError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParseError(LoftError):
    """Malformed input file or word token."""

    exit_code = 3


class ValidationError(LoftError):
    """A complex failed a structural invariant."""

    exit_code = 4


class GluingNotInvolutive(ValidationError):
    pass


class NotClosed(ValidationError):
    pass


class NotOneVertex(ValidationError):
    pass


class NotOrientable(ValidationError):
    pass


class EulerMismatch(ValidationError):
    pass


class LinkNotSphere(ValidationError):
    pass


class EdgeReversed(ValidationError):
    """An edge class is identified with itself reversing orientation."""


class OrderError(LoftError):
    """Invalid order specification or order/complex incompatibility."""

    exit_code = 5


class EdgeEquivalentToUnit(OrderError):
    """An edge word is incomparable with the identity, violating the
    admissibility condition for building a foliation from this order."""

    def __init__(self, edge_name):
        self.edge_name = edge_name
        super().__init__(f"edge {edge_name!r} is equivalent to the unit under the order")


class UnknownWord(OrderError):
    """A word outside a finite table-backed order's domain."""


class TraceError(LoftError):
    exit_code = 6


class WallCrossedTwice(TraceError):
    """A leaf trace met the same wall twice; indicates a construction bug."""


class InsufficientSupport(LoftError):
    """A table does not contain enough products to extend the action."""

    exit_code = 5

    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(f"{len(self.missing)} products missing from the table")


class NotConverged(LoftError):
    """An endpoint estimate did not stabilize within the trace."""

    exit_code = 7

    def __init__(self, depth, message=""):
        self.depth = depth
        super().__init__(message or f"not converged after {depth} crossings")


class Prop41Violation(LoftError):
    """The two regularity verdicts disagreed; this is an implementation bug."""

    exit_code = 8


class GuardExceeded(LoftError):
    """A tractability guard (ball size, enumeration size) was exceeded."""

    exit_code = 9


class PrecisionExhausted(LoftError):
    """Interval refinement hit the precision-bits budget."""

    exit_code = 10
