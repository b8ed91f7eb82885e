"""Run configuration models."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from career_lab.core.config import settings
from career_lab.core.exceptions import ConfigError
from career_lab.models.params import (
    INFINITE,
    CostSpec,
    ModelParams,
    PowerCost,
    ValidatedModel,
    parse_cost,
    parse_h_delta,
    validate_params,
)
from career_lab.models.results import FocVariant, SimConfig

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """Everything a CLI command needs; validated before any computation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    m1: float = Field(0.0, description="Prior mean of ability")
    h1: float = Field(1.0, description="Prior precision of ability")
    h_eps: float = Field(1.0, description="Precision of the output noise")
    h_delta: Union[Literal["inf"], float] = Field(INFINITE, description="Ability-shock precision or 'inf'")
    beta: float = Field(0.9, description="Discount factor")
    cost: CostSpec = Field(default_factory=PowerCost, description="Effort cost family")
    tol: float = Field(default_factory=lambda: settings.default_tol, gt=0, description="Series tolerance")
    T: int = Field(default_factory=lambda: settings.default_T, ge=1, description="Number of periods")
    n_reps: int = Field(
        default_factory=lambda: settings.default_n_reps, ge=1, description="Monte-Carlo replications"
    )
    master_seed: int = Field(
        default_factory=lambda: settings.default_master_seed, ge=0, description="Master random seed"
    )
    workers: int = Field(default_factory=lambda: settings.workers, ge=1, description="Worker processes")
    output_format: Literal["csv", "json"] = Field("csv", description="Tabular output format")
    # test hook: the FOC variant used to produce efforts in `verify`
    solver_variant: FocVariant = Field(FocVariant.CORRECTED, description="FOC behind the efforts `verify` checks")

    @field_validator("h_delta", mode="before")
    @classmethod
    def _tag_infinite(cls, value):
        return parse_h_delta(value)

    @field_validator("cost", mode="before")
    @classmethod
    def _cost_shorthand(cls, value):
        if isinstance(value, str):
            return parse_cost(value)
        return value

    @property
    def params(self) -> ModelParams:
        return ModelParams(m1=self.m1, h1=self.h1, h_eps=self.h_eps, h_delta=self.h_delta, beta=self.beta)

    def validated(self) -> ValidatedModel:
        return validate_params(self.params, self.cost)

    def sim_config(self, **changes) -> SimConfig:
        return SimConfig(
            T=self.T,
            n_reps=self.n_reps,
            master_seed=self.master_seed,
            params=self.params,
            cost=self.cost,
            tol=self.tol,
            workers=self.workers,
            **changes,
        )

    @classmethod
    def load(
        cls,
        config_file: Optional[Path] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> "RunConfig":
        """Defaults < config file < CAREER_LAB_SEED < explicit overrides (flags)."""
        data: Dict[str, Any] = {}
        if config_file is not None:
            try:
                data.update(json.loads(Path(config_file).read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"Cannot read config file {config_file}: {exc}") from exc
            logger.info(f"Loaded config file {config_file}")
        if settings.seed is not None:
            data["master_seed"] = settings.seed
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"Invalid configuration: {exc}") from exc
