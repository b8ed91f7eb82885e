"""Domain errors. Each class carries the CLI exit code it maps to."""

from typing import List, Optional


class CareerLabError(Exception):
    """Base class for every laboratory error."""

    exit_code: int = 1


class ConfigError(CareerLabError):
    """Unusable run configuration."""


class NonPositivePrecision(ConfigError):
    pass


class BetaOutOfRange(ConfigError):
    pass


class CostParamInvalid(ConfigError):
    pass


class InvalidModelError(ConfigError):
    """Raised by validate_params with every violated constraint."""

    def __init__(self, problems: List[CareerLabError]):
        self.problems = problems
        super().__init__("; ".join(f"{type(p).__name__}: {p}" for p in problems))


class NegativeEffort(CareerLabError):
    pass


class NegativeTarget(CareerLabError):
    pass


class NonFiniteSignal(CareerLabError):
    pass


class NoSteadyState(CareerLabError):
    pass


class PathTooShort(CareerLabError):
    pass


class VariantRequiresPersistentType(CareerLabError):
    pass


class NotDivergentRegime(CareerLabError):
    pass


class TooFewReplications(CareerLabError):
    pass


class UnknownSweepVariable(CareerLabError):
    pass


class DivergentSeries(CareerLabError):
    """Marginal-benefit series has no finite sum (beta=1 with h_delta=inf)."""

    exit_code = 2

    def __init__(self, message: Optional[str] = None):
        super().__init__(
            message
            or "marginal benefit diverges: beta=1 with h_delta=inf has no finite equilibrium effort"
        )


class VerificationFailed(CareerLabError):
    exit_code = 3

    def __init__(self, failed: List[str]):
        self.failed = failed
        super().__init__(f"{len(failed)} verification check(s) failed: {', '.join(failed)}")
