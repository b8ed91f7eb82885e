"""Model primitives and effort-cost families."""

import logging
import math
from typing import Annotated, List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from career_lab.core.exceptions import (
    BetaOutOfRange,
    CareerLabError,
    ConfigError,
    CostParamInvalid,
    InvalidModelError,
    NonPositivePrecision,
)

logger = logging.getLogger(__name__)

INFINITE = "inf"
_INFINITE_SPELLINGS = {"inf", "+inf", "infinity", "+infinity"}


def parse_h_delta(value: Union[str, float, int]) -> Union[Literal["inf"], float]:
    """Map the accepted spellings of an infinite ability-shock precision to the tag."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in _INFINITE_SPELLINGS:
            return INFINITE
        try:
            value = float(text)
        except ValueError as exc:
            raise ConfigError(f"h_delta must be a number or 'inf', got {value!r}") from exc
    value = float(value)
    if math.isinf(value) and value > 0:
        return INFINITE
    return value


class ModelParams(BaseModel):
    """Primitives (m1, h1, h_eps, h_delta, beta).

    Constraints are checked by validate_params, not on construction, so that
    every violation can be reported at once.
    """

    model_config = ConfigDict(frozen=True)

    m1: float = Field(0.0, description="Prior mean of ability")
    h1: float = Field(1.0, description="Prior precision of ability")
    h_eps: float = Field(1.0, description="Precision of the output noise")
    h_delta: Union[Literal["inf"], float] = Field(
        INFINITE, description="Precision of the ability shock, or 'inf' for a persistent type"
    )
    beta: float = Field(0.9, description="Discount factor")

    @field_validator("h_delta", mode="before")
    @classmethod
    def _tag_infinite(cls, value):
        return parse_h_delta(value)

    @property
    def persistent(self) -> bool:
        """True when ability never changes (h_delta is Infinite)."""
        return self.h_delta == INFINITE

    @property
    def r(self) -> float:
        """Noise-to-shock ratio h_eps/h_delta; 0 for a persistent type."""
        if self.persistent:
            return 0.0
        return self.h_eps / self.h_delta

    @property
    def divergent_regime(self) -> bool:
        return self.beta == 1.0 and self.persistent

    def with_updates(self, **changes) -> "ModelParams":
        return self.model_validate({**self.model_dump(), **changes})


class PowerCost(BaseModel):
    """g(a) = c * a**p / p."""

    model_config = ConfigDict(frozen=True)

    type: Literal["power"] = Field("power", description="Cost family tag")
    c: float = Field(1.0, description="Scale")
    p: float = Field(2.0, description="Exponent, above 1")


class FlatThenPowerCost(BaseModel):
    """g(a) = 0 on [0, k] and c * (a - k)**p / p beyond k.

    Violates g'(a) = 0 => a = 0 on purpose.
    """

    model_config = ConfigDict(frozen=True)

    type: Literal["flat_then_power"] = Field("flat_then_power", description="Cost family tag")
    k: float = Field(1.0, description="Width of the costless region")
    c: float = Field(1.0, description="Scale beyond k")
    p: float = Field(2.0, description="Exponent beyond k, above 1")


CostSpec = Annotated[Union[PowerCost, FlatThenPowerCost], Field(discriminator="type")]


def parse_cost(text: str) -> Union[PowerCost, FlatThenPowerCost]:
    """Parse the command-line shorthand ``power:c:p`` or ``flat_then_power:k:c:p``."""
    parts = [part.strip() for part in text.split(":")]
    try:
        if parts[0] == "power" and len(parts) == 3:
            return PowerCost(c=float(parts[1]), p=float(parts[2]))
        if parts[0] == "flat_then_power" and len(parts) == 4:
            return FlatThenPowerCost(k=float(parts[1]), c=float(parts[2]), p=float(parts[3]))
    except ValueError as exc:
        raise ConfigError(f"Invalid cost specification {text!r}: {exc}") from exc
    raise ConfigError(
        f"Invalid cost specification {text!r}; expected power:c:p or flat_then_power:k:c:p"
    )


class ValidatedModel(BaseModel):
    """Parameters and cost that passed validate_params."""

    model_config = ConfigDict(frozen=True)

    params: ModelParams = Field(..., description="Checked primitives")
    cost: CostSpec = Field(..., description="Checked cost family")
    divergent_regime: bool = Field(False, description="beta = 1 with a persistent type")


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value)


def validate_params(params: ModelParams, cost: CostSpec) -> ValidatedModel:
    """Check every constraint on the primitives and the cost family.

    Raises:
        InvalidModelError: listing each violated constraint.
    """
    problems: List[CareerLabError] = []

    if not _finite(params.m1):
        problems.append(ConfigError(f"m1 must be finite, got {params.m1}"))
    for name in ("h1", "h_eps"):
        value = getattr(params, name)
        if not (_finite(value) and value > 0):
            problems.append(NonPositivePrecision(f"{name} must be a finite positive precision, got {value}"))
    if not params.persistent and not (_finite(params.h_delta) and params.h_delta > 0):
        problems.append(
            NonPositivePrecision(f"h_delta must be positive or 'inf', got {params.h_delta}")
        )
    if not (_finite(params.beta) and 0.0 <= params.beta <= 1.0):
        problems.append(BetaOutOfRange(f"beta must lie in [0, 1], got {params.beta}"))

    if not (_finite(cost.c) and cost.c > 0):
        problems.append(CostParamInvalid(f"cost c must be positive, got {cost.c}"))
    if not (_finite(cost.p) and cost.p > 1):
        problems.append(CostParamInvalid(f"cost exponent p must exceed 1, got {cost.p}"))
    if isinstance(cost, FlatThenPowerCost) and not (_finite(cost.k) and cost.k > 0):
        problems.append(CostParamInvalid(f"flat region k must be positive, got {cost.k}"))

    if problems:
        raise InvalidModelError(problems)

    if params.divergent_regime:
        logger.warning("beta=1 with h_delta=inf: marginal benefit of effort diverges")

    return ValidatedModel(params=params, cost=cost, divergent_regime=params.divergent_regime)
