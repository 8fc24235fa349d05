"""Exception types shared across the toolkit."""


class ConvexaError(Exception):
    """Base class for all toolkit errors."""


class RangeError(ConvexaError):
    """An element id is outside 0..n-1."""


class CycleError(ConvexaError):
    """The strict relation has a directed cycle, so it is not an order."""


class SizeError(ConvexaError):
    """An input exceeds a configured enumeration cap."""


class BudgetError(ConvexaError):
    """A sweep would exceed the configured assignment budget."""


class FormatError(ConvexaError):
    """A poset/lattice/term file is malformed.

    `line` is the 1-based offending line number when known.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class NotALattice(ConvexaError):
    """The given order is not a lattice; names a pair without unique lub/glb."""

    def __init__(self, x, y, reason="no unique bound"):
        super().__init__(f"elements {x} and {y}: {reason}")
        self.pair = (x, y)


class UnboundVariable(ConvexaError, KeyError):
    """A term variable is missing from the assignment."""


class UnknownTag(ConvexaError):
    """Unrecognized axiom/identity tag."""


class NotDRelated(ConvexaError):
    """The requested pair is not in the join-dependency relation."""


class NotInSUB(ConvexaError):
    """The lattice fails the join-irreducible membership test for SUB."""

    def __init__(self, report):
        super().__init__(f"axiom {report.tag} fails, witness {report.witness}")
        self.report = report


class WellDefinednessViolation(ConvexaError):
    """C-set values disagree across conjugates (non-SUB input or a bug)."""


class PartitionViolation(ConvexaError):
    """No consistent two-block join partition exists (non-SUB input)."""


class AcyclicityViolation(ConvexaError):
    """A constructed predecessor relation is not acyclic or not reduced."""


class DCycleError(ConvexaError):
    """The join-dependency relation has a cycle, so the tree-like target is infinite."""


class DepthCapExceeded(ConvexaError):
    """Sequence construction ran past the depth cap."""


class TreeLikenessViolation(ConvexaError):
    """A constructed poset that must be tree-like is not."""


class ConvexityViolation(ConvexaError):
    """An image set that must be order-convex is not."""


class HomomorphismViolation(ConvexaError):
    """An embedding candidate fails injectivity, a bound, or a meet/join equation."""
