"""Configuration management for the laboratory."""

from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings."""

    model_config = SettingsConfigDict(
        env_prefix="CAREER_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    app_name: str = "Career Concerns Lab"
    version: str = "1.0.0"

    # Numerics
    default_tol: float = 1e-10
    default_T: int = 10
    default_n_reps: int = 100_000
    default_master_seed: int = 42
    max_series_terms: int = 10_000_000

    # Simulation
    workers: int = 1
    block_size: int = 1000  # replications per random stream, never depends on workers
    min_calibration_reps: int = 10_000

    # CAREER_LAB_SEED overrides the run's master seed
    seed: Optional[int] = None

    # Logging
    log_level: str = "WARNING"
    log_format: str = "json"
    log_file: Optional[str] = None


settings = Settings()
