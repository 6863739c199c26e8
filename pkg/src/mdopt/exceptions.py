"""Exception hierarchy shared by the solver modules."""


class MDOptError(Exception):
    """Base class for all errors raised by mdopt."""


class InvalidArgument(MDOptError, ValueError):
    """Malformed input: dimension mismatch, non-finite entries, bad constants."""


class UnsupportedGeometry(MDOptError):
    """No closed-form mirror step exists for the requested set/prox pair."""


class InfeasibleReference(MDOptError):
    """The reference solver never found a feasible point."""


class InfeasibilityCertificate(MDOptError):
    """A constraint has a vanishing subgradient while still violated.

    The constraint attains its minimum above the tolerance, so the
    sub-level set is empty.
    """

    def __init__(self, message, index=None, x=None):
        super().__init__(message)
        self.index = index
        self.x = x


class TheoryContradiction(MDOptError):
    """A run finished with no productive step where theory forbids it.

    This almost always means the problem constants are wrong (e.g. an
    underestimated ``M_g``). The partial trace is attached for inspection.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class IterationCapReached(MDOptError):
    """An inner solver inside a restart chain hit its iteration cap."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
