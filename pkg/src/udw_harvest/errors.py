"""Exception and warning types raised across the package."""


class HarvestError(Exception):
    """Base class for all package errors."""


class OverflowRange(HarvestError, ValueError):
    """Argument outside the range where an unscaled special function is finite."""


class BudgetExhausted(HarvestError):
    """Quadrature hit its evaluation budget before meeting the tolerance.

    The best available estimate is kept on ``result`` so callers can decide
    whether a partial value is good enough.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonDecayingIntegrand(HarvestError):
    """Segment contributions of a semi-infinite integral stopped shrinking."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class OnLightCone(HarvestError, ValueError):
    """Pointwise kernel requested exactly on the light cone |dt| = r."""


class InvalidRadius(HarvestError, ValueError):
    pass


class UnsupportedScenario(HarvestError, ValueError):
    """A closed form was asked for outside its domain of validity."""


class ExtrapolationUnstable(HarvestError):
    """Successive epsilon-extrapolants disagree beyond their error budget."""


class ConfigError(HarvestError, ValueError):
    pass


class PerturbativityWarning(UserWarning):
    """A density-matrix block is large enough that O(lambda^4) terms matter."""
