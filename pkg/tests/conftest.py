import pytest

from src.statelearn.models.params import SimConfig, StateSpaceParams
from src.statelearn.models.partition import StatePartition
from src.statelearn.services.simulation_service import SimulationService


def make_small_params() -> StateSpaceParams:
    """One exogenous state z, one endogenous state x, two controls."""
    part = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y1", "y2"))
    return StateSpaceParams(
        partition=part,
        E=[[0.7]],
        C=[[0.5]],
        D=[[0.8]],
        A=[[0.6], [-0.4]],
        B=[[1.0], [0.5]],
        shock_variances={"z": 1.0, "x": 0.04, "y1": 0.04, "y2": 0.04},
    )


@pytest.fixture
def small_params():
    """One exogenous state z, one endogenous state x, two controls"""
    return make_small_params()


@pytest.fixture
def small_frame(small_params):
    """2,000 noise-free rows from the small model."""
    return SimulationService().simulate(SimConfig(params=small_params, n=2000, seed=11, burn_in=200))


@pytest.fixture
def noisy_frame(small_params):
    """Same model with observation noise on x, y1 and y2."""
    return SimulationService().simulate(
        SimConfig(params=small_params, n=2000, seed=12, burn_in=200, observation_noise=True)
    )
