"""Shared fixtures; expensive closed-loop runs execute once per session."""

import time
from dataclasses import dataclass

import pytest

from etcontrol.design import build_trigger_design, design_gains
from etcontrol.scenarios import get_scenario
from etcontrol.simulate import metrics, simulate


@dataclass(frozen=True)
class RunBundle:
    scenario: object
    gains: object
    design: object
    trace: object
    report: object
    duration: float


def run_scenario(scenario):
    t0 = time.perf_counter()
    gains = design_gains(scenario.model, scenario.weights)
    design = build_trigger_design(
        scenario.model, gains, sigma=scenario.sigma,
        epsilon=scenario.epsilon, Q_tilde=scenario.Q_tilde,
    )
    trace = simulate(scenario.model, gains, design, scenario.config)
    report = metrics(trace, design, weights=scenario.weights)
    return RunBundle(scenario, gains, design, trace, report, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def maglev_run():
    return run_scenario(get_scenario("maglev"))


@pytest.fixture(scope="session")
def mass_spring_run():
    return run_scenario(get_scenario("mass-spring"))


@pytest.fixture(scope="session")
def ieee13_run():
    return run_scenario(get_scenario("ieee13"))


@pytest.fixture(scope="session")
def mass_spring_delay_runs():
    base = get_scenario("mass-spring")
    return {
        d: run_scenario(base.with_overrides(delay=d)) for d in (0.01, 0.1)
    }


@pytest.fixture(scope="session")
def maglev_grid():
    """The six (sigma, epsilon) operating points of the published table."""
    base = get_scenario("maglev")
    grid = {}
    for eps in (0.01, 0.05):
        for sig in (0.75, 0.5, 0.25):
            grid[(sig, eps)] = run_scenario(base.with_overrides(sigma=sig, epsilon=eps))
    return grid
