"""Result and state models."""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from career_lab.core.exceptions import PathTooShort
from career_lab.models.params import CostSpec, ModelParams, PowerCost


class BeliefState(BaseModel):
    """Market posterior N(m, 1/h) on current ability."""

    model_config = ConfigDict(frozen=True)

    m: float = Field(..., description="Posterior mean of current ability")
    h: float = Field(..., gt=0, description="Posterior precision of current ability")


class PrecisionPath(BaseModel):
    """Deterministic precisions h_1..h_T and weights mu_t = h_t/(h_t+h_eps)."""

    model_config = ConfigDict(frozen=True)

    h_seq: Tuple[float, ...] = Field(..., description="Prior precisions h_1..h_T")
    mu_seq: Tuple[float, ...] = Field(..., description="Weights on the prior mean, mu_t = h_t/(h_t+h_eps)")
    params: ModelParams = Field(..., description="Primitives the path was generated from")

    @model_validator(mode="after")
    def _same_length(self):
        if len(self.h_seq) != len(self.mu_seq) or not self.h_seq:
            raise ValueError("h_seq and mu_seq must be nonempty and of equal length")
        return self

    @property
    def T(self) -> int:
        return len(self.h_seq)

    def h(self, t: int) -> float:
        """Precision at period t (1-indexed)."""
        self._check(t)
        return self.h_seq[t - 1]

    def mu(self, t: int) -> float:
        self._check(t)
        return self.mu_seq[t - 1]

    @property
    def posterior_seq(self) -> Tuple[float, ...]:
        """h_t + h_eps: precision after y_t, before the ability shock."""
        return tuple(h + self.params.h_eps for h in self.h_seq)

    def _check(self, t: int) -> None:
        if not 1 <= t <= self.T:
            raise PathTooShort(f"period {t} outside path of length {self.T}")


class SteadyState(BaseModel):
    model_config = ConfigDict(frozen=True)

    h_star: float = Field(..., description="Stationary prior precision")
    mu_star: float = Field(..., description="Stationary weight on the prior mean")
    r: float = Field(..., description="Noise-to-shock ratio h_eps/h_delta")
    residual: float = Field(0.0, description="|precision_step(h_star) - h_star|")

    @property
    def posterior_precision(self) -> float:
        # h/mu = h + h_eps
        return self.h_star / self.mu_star


class SeriesValue(BaseModel):
    """A truncated series with its certified tail bound."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., description="Partial sum of the series")
    tail_bound: float = Field(..., description="Certified bound on the omitted tail")
    terms_used: int = Field(..., description="Number of summed terms")


class FocVariant(str, Enum):
    CORRECTED = "corrected"
    H10_AS_PUBLISHED = "h10"
    H21_AS_PUBLISHED = "h21"


class EquilibriumPath(BaseModel):
    """Marginal benefits gamma_t and efforts a_t* for t = 1..T."""

    model_config = ConfigDict(frozen=True)

    precision: PrecisionPath = Field(..., description="Precisions and weights along the path")
    gamma_seq: Tuple[float, ...] = Field(..., description="Marginal benefit of effort per period")
    effort_seq: Tuple[float, ...] = Field(..., description="Equilibrium effort per period")
    trunc_report: Tuple[SeriesValue, ...] = Field(..., description="Truncation certificate per period")
    tol: float = Field(..., description="Series tolerance the path was solved to")

    @property
    def T(self) -> int:
        return len(self.gamma_seq)

    def rows(self) -> List[dict]:
        return [
            {
                "t": t,
                "h_t": self.precision.h(t),
                "mu_t": self.precision.mu(t),
                "gamma_t": self.gamma_seq[t - 1],
                "a_star_t": self.effort_seq[t - 1],
                "terms_used": self.trunc_report[t - 1].terms_used,
                "tail_bound": self.trunc_report[t - 1].tail_bound,
            }
            for t in range(1, self.T + 1)
        ]


class MonotonicityReport(BaseModel):
    grid: List[float] = Field(..., description="Prior weights mu_1 scanned")
    gamma: List[float] = Field(..., description="Marginal benefit at each grid point")
    strictly_decreasing: bool = Field(..., description="Whether every adjacent step decreases")
    worst_adjacent_difference: Optional[float] = Field(
        None, description="Largest gamma(mu_next) - gamma(mu); None for a single point"
    )


class PersistencePoint(BaseModel):
    r: float = Field(..., description="Noise-to-shock ratio h_eps/h_delta")
    mu_star: float = Field(..., description="Stationary weight on the prior mean")
    gamma: float = Field(..., description="Stationary marginal benefit")
    a_star: float = Field(..., description="Stationary equilibrium effort")


class SimConfig(BaseModel):
    """Monte-Carlo run description."""

    model_config = ConfigDict(frozen=True)

    T: int = Field(10, ge=1, description="Number of periods")
    n_reps: int = Field(100_000, ge=1, description="Monte-Carlo replications")
    master_seed: int = Field(42, ge=0, description="Seed of every block stream")
    params: ModelParams = Field(default_factory=ModelParams, description="Model primitives")
    cost: CostSpec = Field(default_factory=PowerCost, description="Effort cost family")
    tol: float = Field(1e-10, gt=0, description="Series tolerance for the equilibrium efforts")
    workers: int = Field(1, ge=1, description="Parallel worker processes")
    # negative control: the market never updates (m, h)
    freeze_beliefs: bool = Field(False, description="Keep the market at its prior beliefs")


class SimStats(BaseModel):
    """Per-period Monte-Carlo aggregates, index 0 is period 1."""

    n_reps: int = Field(..., description="Replications aggregated")
    mean_resid: List[float] = Field(..., description="Mean of y_t - w_t")
    se_resid: List[float] = Field(..., description="Standard error of mean_resid")
    mean_eta_minus_m: List[float] = Field(..., description="Mean of ability minus the market mean")
    se_eta_minus_m: List[float] = Field(..., description="Standard error of mean_eta_minus_m")
    var_eta_minus_m: List[float] = Field(..., description="Sample variance of ability minus the market mean")
    theory_var: List[float] = Field(..., description="Filter variance 1/h_t")

    @property
    def T(self) -> int:
        return len(self.mean_resid)


class CalibrationReport(BaseModel):
    n_reps: int = Field(..., description="Replications behind the sample variances")
    relative_se: float = Field(..., description="Relative standard error of a sample variance")
    flagged_periods: List[int] = Field(..., description="Periods whose variance is off by more than z")
    z_scores: List[float] = Field(..., description="Standardised variance gap per period")

    @property
    def calibrated(self) -> bool:
        return not self.flagged_periods


class DeviationReport(BaseModel):
    t: int = Field(..., description="Period of the one-shot deviation")
    a_star_t: float = Field(..., description="Equilibrium effort from the solver")
    argmax: float = Field(..., description="Maximiser of the deviation objective")
    fd_derivative: float = Field(..., description="Finite-difference slope of the objective at a_star_t")
    foc_gap: float = Field(..., description="gamma_t - g'(a_star_t)")
    grid_resolution: float = Field(..., description="Spacing of the coarse search grid")
    flat_argmax: bool = Field(False, description="Objective is flat around the maximiser")

    @property
    def agrees(self) -> bool:
        return abs(self.argmax - self.a_star_t) <= 1e-6 or (
            self.flat_argmax and abs(self.argmax - self.a_star_t) <= self.grid_resolution + 1e-6
        )
