"""Exception hierarchy shared by all skizze modules."""


class SkizzeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SkizzeError, ValueError):
    """A precondition on user-supplied data was violated."""


class NumericFailure(SkizzeError, RuntimeError):
    """An iterative numeric procedure did not converge.

    The best iterate reached is attached so callers can inspect it.
    """

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class DegenerateLocus(SkizzeError):
    """Critical points are not pairwise distinct (semisimplicity fails)."""


class DegenerateMetric(SkizzeError):
    """A second derivative vanishes at a critical point."""


class TraceFailure(SkizzeError):
    """Boundary seeding or arc assembly failed."""


class ConditioningFailure(SkizzeError):
    """Step size collapsed near an unregistered singularity."""

    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class ExtractionFailure(SkizzeError):
    """Traced arcs do not assemble into a coherent combinatorial map."""


class StructuralError(SkizzeError):
    """A graph is malformed below the level of the decoration rules."""


class ColoringContradiction(SkizzeError):
    """Face colors cannot be propagated consistently."""


class RefusedMove(SkizzeError):
    """A contraction would violate a validity bound."""


class CapExceeded(SkizzeError):
    """A configured size cap was exceeded.

    ``estimate`` carries a rough size estimate when one is available.
    """

    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class AdvectionSingular(SkizzeError):
    """The gradient collapsed at a marker during front advection."""

    def __init__(self, msg, location=None, t=None):
        super().__init__(msg)
        self.location = location
        self.t = t


class UnresolvedCluster(SkizzeError):
    """Two wall events could not be separated on the refined grid."""


class PathExhausted(SkizzeError):
    """A deformation session was stepped past t = 1."""


class PersistentDegeneracyWarning(UserWarning):
    """An event function stays at zero over a sub-interval: the path runs
    inside a wall and sign-change detection is blind there."""
