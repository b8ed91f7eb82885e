"""Command-line front end: path, steady, errata, simulate, verify, sweep."""

import logging
import math
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Dict, Iterator, List, Optional

import click
import typer
from typer.core import TyperGroup

from career_lab import __version__
from career_lab.core.config import settings
from career_lab.core.exceptions import (
    BetaOutOfRange,
    CareerLabError,
    ConfigError,
    DivergentSeries,
    UnknownSweepVariable,
    VariantRequiresPersistentType,
    VerificationFailed,
)
from career_lab.models.params import ModelParams
from career_lab.models.requests import RunConfig
from career_lab.models.results import FocVariant
from career_lab.services.beliefs import belief_dynamics
from career_lab.services.costs import marginal_cost_inverse
from career_lab.services.equilibrium import equilibrium_solver
from career_lab.services.exporters import SIM_STATS_COLUMNS, exporter
from career_lab.services.simulation import simulator
from career_lab.services.statics import comparative_statics
from career_lab.services.verification import MU_GRID_99, verification_suite
from career_lab.utils.logger import setup_logging

logger = logging.getLogger(__name__)

PATH_COLUMNS = ["t", "h_t", "mu_t", "gamma_t", "a_star_t", "terms_used", "tail_bound"]
ERRATA_COLUMNS = ["t", "gamma_corrected", "gamma_h10", "gamma_h21", "diff_h10", "ratio_h21"]
SWEEP_COLUMNS = {
    "r": ["r", "mu_star", "gamma", "a_star"],
    "beta": ["beta", "mu_star", "gamma", "a_star"],
    "mu1": ["mu1", "gamma"],
}
SWEEP_DEFAULTS = {
    "r": [1.0, 0.1, 0.01, 0.001],
    "beta": [0.1, 0.3, 0.5, 0.7, 0.9, 0.99],
    "mu1": MU_GRID_99,
}
SWEEP_Y = {"r": "a_star", "beta": "a_star", "mu1": "gamma"}


class LabGroup(TyperGroup):
    """Malformed command lines are configuration errors and exit with 1."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = ConfigError.exit_code
            raise


app = typer.Typer(
    name="career-lab",
    cls=LabGroup,
    help="Equilibrium laboratory for the career-concerns model.",
    add_completion=False,
    no_args_is_help=True,
)

ConfigFile = Annotated[Optional[Path], typer.Option("--config", help="JSON run configuration.")]
M1 = Annotated[Optional[float], typer.Option("--m1", help="Prior mean of ability.")]
H1 = Annotated[Optional[float], typer.Option("--h1", help="Prior precision of ability.")]
HEps = Annotated[Optional[float], typer.Option("--h-eps", help="Output-noise precision.")]
HDelta = Annotated[Optional[str], typer.Option("--h-delta", help="Ability-shock precision or 'inf'.")]
Beta = Annotated[Optional[float], typer.Option("--beta", help="Discount factor in [0, 1].")]
Cost = Annotated[
    Optional[str], typer.Option("--cost", help="power:c:p or flat_then_power:k:c:p.")
]
Tol = Annotated[Optional[float], typer.Option("--tol", help="Series truncation tolerance.")]
Periods = Annotated[Optional[int], typer.Option("--T", help="Number of periods.")]
NReps = Annotated[Optional[int], typer.Option("--n-reps", help="Monte-Carlo replications.")]
Seed = Annotated[Optional[int], typer.Option("--master-seed", help="Master random seed.")]
Workers = Annotated[Optional[int], typer.Option("--workers", help="Parallel worker processes.")]
Output = Annotated[Optional[Path], typer.Option("--output", "-o", help="Write to file instead of stdout.")]
Format = Annotated[Optional[str], typer.Option("--format", help="csv or json.")]
Stationary = Annotated[
    bool, typer.Option("--stationary", help="Start from the stationary precision h*.")
]


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Convert domain errors into the CLI exit-code contract."""
    try:
        yield
    except CareerLabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(code=exc.exit_code)


def _run_config(config_file: Optional[Path], **flags: Any) -> RunConfig:
    overrides = {k: v for k, v in flags.items() if v is not None}
    return RunConfig.load(config_file, overrides)


def _start_params(run: RunConfig, stationary: bool) -> ModelParams:
    params = run.validated().params
    if stationary:
        params = params.with_updates(h1=belief_dynamics.steady_state(params).h_star)
    return params


def _render(rows: List[Dict[str, Any]], columns: List[str], output_format: str) -> str:
    if output_format == "json":
        return exporter.to_json([{k: _json_number(row.get(k)) for k in row} for row in rows])
    return exporter.to_csv(rows, columns)


def _json_number(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _parse_values(text: Optional[str], var: str) -> List[float]:
    if text is None:
        return list(SWEEP_DEFAULTS[var])
    if not text.strip():
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--values must be a comma-separated list of numbers: {exc}") from exc


@app.callback()
def main(
    log_level: Annotated[
        Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR.")
    ] = None,
    version: Annotated[bool, typer.Option("--version", help="Show the version and exit.")] = False,
):
    """Equilibrium laboratory for the career-concerns model."""
    setup_logging(log_level)
    if version:
        typer.echo(f"{settings.app_name} {__version__}")
        raise typer.Exit()


@app.command("path")
def path_command(
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    tol: Tol = None,
    periods: Periods = None,
    output: Output = None,
    output_format: Format = None,
    stationary: Stationary = False,
):
    """Marginal benefits and equilibrium efforts for t = 1..T."""
    with _exit_on_error():
        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta,
            cost=cost, tol=tol, T=periods, output_format=output_format,
        )
        params = _start_params(run, stationary)
        eq = equilibrium_solver.equilibrium_path(params, run.cost, run.T, run.tol)
        rows = eq.rows()
        if run.output_format == "json":
            for row, posterior in zip(rows, eq.precision.posterior_seq):
                row["posterior_precision"] = posterior
        exporter.emit(_render(rows, PATH_COLUMNS, run.output_format), output)


@app.command("steady")
def steady_command(
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    output: Output = None,
):
    """Stationary precision, weight, marginal benefit and effort (finite h_delta)."""
    with _exit_on_error():
        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta, cost=cost
        )
        params = run.validated().params
        ss = belief_dynamics.steady_state(params)
        gamma = equilibrium_solver.steady_state_gamma(ss.mu_star, params.beta)
        payload = {
            "mu_star": ss.mu_star,
            "h_star": ss.h_star,
            "gamma": gamma,
            "a_star": marginal_cost_inverse(run.cost, gamma),
        }
        exporter.emit(exporter.to_json(payload), output)


@app.command("errata")
def errata_command(
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    tol: Tol = None,
    periods: Periods = None,
    output: Output = None,
    output_format: Format = None,
    stationary: Stationary = False,
    variants: Annotated[
        str, typer.Option("--variants", help="auto, h10, h21 or h10,h21.")
    ] = "auto",
):
    """Corrected marginal benefit next to the published (H10) and (H21) forms."""
    with _exit_on_error():
        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta,
            cost=cost, tol=tol, T=periods, output_format=output_format,
        )
        params = _start_params(run, stationary)
        if params.beta >= 1.0:
            raise BetaOutOfRange("errata comparison requires beta < 1")

        if variants.strip() == "auto":
            wanted = {FocVariant.H21_AS_PUBLISHED}
            if params.persistent:
                wanted.add(FocVariant.H10_AS_PUBLISHED)
        else:
            try:
                wanted = {FocVariant(v.strip()) for v in variants.split(",") if v.strip()}
            except ValueError as exc:
                raise ConfigError(f"unknown variant in {variants!r}") from exc
        if FocVariant.H10_AS_PUBLISHED in wanted and not params.persistent:
            raise VariantRequiresPersistentType(
                "the published (H10) form applies only with h_delta=inf"
            )

        path = belief_dynamics.precision_path(params, run.T)
        rows = []
        for t in range(1, run.T + 1):
            corrected = equilibrium_solver.marginal_benefit(t, path, params.beta, run.tol).gamma
            row: Dict[str, Any] = {"t": t, "gamma_corrected": corrected}
            if FocVariant.H10_AS_PUBLISHED in wanted:
                h10 = equilibrium_solver.marginal_benefit_erratum(
                    FocVariant.H10_AS_PUBLISHED, t, path, params.beta, run.tol
                )
                row["gamma_h10"] = h10
                row["diff_h10"] = h10 - corrected
            if FocVariant.H21_AS_PUBLISHED in wanted:
                h21 = equilibrium_solver.marginal_benefit_erratum(
                    FocVariant.H21_AS_PUBLISHED, t, path, params.beta, run.tol
                )
                row["gamma_h21"] = h21
                row["ratio_h21"] = h21 / corrected if corrected > 0 else math.nan
            rows.append(row)
        exporter.emit(_render(rows, ERRATA_COLUMNS, run.output_format), output)


@app.command("simulate")
def simulate_command(
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    tol: Tol = None,
    periods: Periods = None,
    n_reps: NReps = None,
    master_seed: Seed = None,
    workers: Workers = None,
    output: Output = None,
    output_format: Format = None,
    freeze_beliefs: Annotated[
        bool, typer.Option("--freeze-beliefs", help="Market never updates (m, h): a negative control.")
    ] = False,
):
    """Per-period Monte-Carlo statistics; flag marks periods failing filter calibration."""
    with _exit_on_error():
        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta,
            cost=cost, tol=tol, T=periods, n_reps=n_reps, master_seed=master_seed,
            workers=workers, output_format=output_format,
        )
        if run.validated().divergent_regime:
            raise DivergentSeries()
        stats = simulator.simulate(run.sim_config(freeze_beliefs=freeze_beliefs))
        calibration = simulator.filter_calibration(stats)
        rows = exporter.sim_stats_rows(stats, calibration)
        exporter.emit(_render(rows, SIM_STATS_COLUMNS, run.output_format), output)


@app.command("verify")
def verify_command(
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    tol: Tol = None,
    periods: Periods = None,
    n_reps: NReps = None,
    master_seed: Seed = None,
    workers: Workers = None,
    output: Output = None,
    stats_csv: Annotated[
        Optional[Path], typer.Option("--stats-csv", help="Also write the per-period simulation statistics.")
    ] = None,
    solver_variant: Annotated[
        Optional[str], typer.Option("--solver-variant", hidden=True)
    ] = None,
):
    """Run the equilibrium property suite; exit 3 if any check fails."""
    with _exit_on_error():
        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta,
            cost=cost, tol=tol, T=periods, n_reps=n_reps, master_seed=master_seed,
            workers=workers, solver_variant=solver_variant,
        )
        report, stats, calibration = verification_suite.run_with_stats(run)
        if stats_csv is not None:
            exporter.emit(exporter.sim_stats_csv(stats, calibration), stats_csv)
        exporter.emit(exporter.to_json(report), output)
        if not report["passed"]:
            raise VerificationFailed([c["name"] for c in report["checks"] if not c["passed"]])


@app.command("sweep")
def sweep_command(
    var: Annotated[str, typer.Option("--var", help="Swept variable: r, beta or mu1.")],
    values: Annotated[
        Optional[str], typer.Option("--values", help="Comma-separated sweep points.")
    ] = None,
    svg: Annotated[Optional[Path], typer.Option("--svg", help="Write a line chart here.")] = None,
    y: Annotated[Optional[str], typer.Option("--y", help="Column plotted against the sweep.")] = None,
    config_file: ConfigFile = None,
    m1: M1 = None,
    h1: H1 = None,
    h_eps: HEps = None,
    h_delta: HDelta = None,
    beta: Beta = None,
    cost: Cost = None,
    tol: Tol = None,
    output: Output = None,
    output_format: Format = None,
):
    """Comparative statics over r (persistence), beta, or mu1 (monotonicity in the prior weight)."""
    with _exit_on_error():
        if var not in SWEEP_COLUMNS:
            raise UnknownSweepVariable(f"cannot sweep {var!r}; choose r, beta or mu1")
        columns = SWEEP_COLUMNS[var]
        y_column = y or SWEEP_Y[var]
        if y_column not in columns[1:]:
            raise ConfigError(f"--y must be one of {', '.join(columns[1:])}")

        run = _run_config(
            config_file, m1=m1, h1=h1, h_eps=h_eps, h_delta=h_delta, beta=beta,
            cost=cost, tol=tol, output_format=output_format,
        )
        params = run.validated().params
        points = _parse_values(values, var)

        rows: List[Dict[str, Any]] = []
        if points and var == "r":
            if any(not (math.isfinite(r) and r > 0) for r in points):
                raise ConfigError("swept r values must be finite and positive")
            scan_points = comparative_statics.persistence_limit_scan(params.beta, run.cost, points)
            rows = [p.model_dump() for p in scan_points]
        elif points and var == "beta":
            mu_star = belief_dynamics.steady_state(params).mu_star
            for b in points:
                if not 0.0 <= b <= 1.0:
                    raise BetaOutOfRange(f"beta must lie in [0, 1], got {b}")
                gamma = equilibrium_solver.steady_state_gamma(mu_star, b)
                rows.append(
                    {"beta": b, "mu_star": mu_star, "gamma": gamma, "a_star": marginal_cost_inverse(run.cost, gamma)}
                )
        elif points:
            scan = comparative_statics.monotonicity_scan(params.beta, params.r, points, run.tol)
            rows = [{"mu1": m, "gamma": g} for m, g in zip(scan.grid, scan.gamma)]
            if not scan.strictly_decreasing:
                logger.warning("gamma is not strictly decreasing in mu1 on this grid")

        logger.info(f"Sweep over {var}: {len(rows)} point(s)")
        exporter.emit(_render(rows, columns, run.output_format), output)
        if svg is not None:
            chart = exporter.render_line_chart(
                [row[var] for row in rows],
                [row[y_column] for row in rows],
                x_label=var,
                y_label=y_column,
            )
            exporter.emit(chart, svg)


def run() -> None:
    app(prog_name="career-lab")
