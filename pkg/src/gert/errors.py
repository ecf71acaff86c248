class GertError(Exception):
    """Base class for all estimator, planner and harness errors."""


class DomainError(GertError, ValueError):
    pass


class Saturated(GertError):
    """Every slot of every round was non-empty; the mean statistic cannot be inverted."""


class InconsistentObservation(GertError, ValueError):
    pass


class EmptyInput(GertError, ValueError):
    pass


class MixedFrameSizes(GertError, ValueError):
    pass


class Infeasible(GertError):
    """No parameter choice satisfies the accuracy requirement."""
