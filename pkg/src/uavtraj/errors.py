"""Exception hierarchy shared by all planning modules."""


class UavTrajError(Exception):
    """Base class for everything raised by this package."""


class ValidationError(UavTrajError, ValueError):
    """A value violates a documented invariant. Message names the field."""


class ParseError(UavTrajError, ValueError):
    """A scenario document is malformed (syntax or unknown structure)."""


class PlannerError(UavTrajError):
    """Base class for runtime failures of the planners and the oracle."""


class OutOfWindow(PlannerError):
    """Trajectory evaluated outside its [t0, T] window."""


class ConjugatePoint(PlannerError):
    """sin(omega*(T-t0)) vanishes: the oscillatory closed form blows up."""


class HorizonOverflow(PlannerError):
    """sinh/cosh argument exceeds the double-precision guard."""


class DegenerateGradient(PlannerError):
    """Interface gradient undefined (circle evaluated at its center)."""


class NoRealInterface(PlannerError):
    """Equal-potential locus of the two phases is empty or a single point."""


class SumZero(PlannerError):
    """Hot-spot curvatures sum to zero; no barycentric reduction exists."""


class StalledOnInterface(PlannerError):
    """Online planner oscillates across the interface without progress."""


class SingleCrossingViolated(PlannerError):
    """A trajectory crosses the interface more than once (or never)."""


class NotHyperbolic(PlannerError):
    """Operation requires both phases to have negative curvature (u0 < 0)."""


class NonDecreasingCost(PlannerError):
    """An accepted optimizer update increased the cost beyond tolerance."""


class VerificationFailure(UavTrajError):
    """A verification report contains at least one failed check."""
