"""Exception hierarchy shared by all modules."""


class RiemannEntropyError(Exception):
    """Base class for every error raised by this package."""


class ProblemError(RiemannEntropyError, ValueError):
    """Invalid problem data. ``field`` names the offending input field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NonIncreasingBreakpoints(ProblemError):
    pass


class NegativeDiffusion(ProblemError):
    pass


class LengthMismatch(ProblemError):
    pass


class OutOfRange(RiemannEntropyError, ValueError):
    pass


class ProbabilityOutOfRange(RiemannEntropyError, ValueError):
    pass


class EmptyGap(RiemannEntropyError, ValueError):
    pass


class DimensionMismatch(RiemannEntropyError, ValueError):
    pass


class DegenerateGap(RiemannEntropyError, ValueError):
    pass


class InfeasiblePoint(RiemannEntropyError, ValueError):
    pass


class NegativeLevel(RiemannEntropyError, ValueError):
    pass


class NonPositiveWeight(RiemannEntropyError, ValueError):
    pass


class NonMonotoneSamples(RiemannEntropyError, ValueError):
    pass


class WrongConfiguration(RiemannEntropyError, ValueError):
    pass


class BadWindow(RiemannEntropyError, ValueError):
    pass


class UnstableParameters(RiemannEntropyError, ValueError):
    pass


class GridMismatch(RiemannEntropyError, ValueError):
    pass


class MaxIterationsExceeded(RiemannEntropyError, RuntimeError):
    """The optimizer hit its iteration cap; ``best`` holds the last iterate."""

    def __init__(self, message, best=None, report=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.report = report
        self.iterations = iterations
