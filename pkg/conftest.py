"""Shared fixtures for the career_lab test suite."""

import logging

import pytest

from career_lab.models.params import FlatThenPowerCost, ModelParams, PowerCost

collect_ignore = ["examples"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte-Carlo runs at acceptance sizes (1e5 replications)")


@pytest.fixture(autouse=True)
def _reset_logging():
    # the CLI binds handlers to CliRunner's stderr, which is closed after each invoke
    yield
    logging.getLogger().handlers = []


@pytest.fixture
def persistent_params() -> ModelParams:
    """h1 = h_eps = 1, persistent type, beta = 0.5."""
    return ModelParams(h1=1.0, h_eps=1.0, h_delta="inf", beta=0.5)


@pytest.fixture
def unit_ratio_params() -> ModelParams:
    """r = h_eps/h_delta = 1, beta = 0.9."""
    return ModelParams(h1=1.0, h_eps=1.0, h_delta=1.0, beta=0.9)


@pytest.fixture
def quadratic() -> PowerCost:
    return PowerCost(c=1.0, p=2.0)


@pytest.fixture
def flat_cost() -> FlatThenPowerCost:
    return FlatThenPowerCost(k=1.0, c=1.0, p=2.0)
