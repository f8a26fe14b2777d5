"""
Built-in linear state-space models for simulation.

small-rbc-like  exogenous g, z; endogenous k; controls w, r, y, c, l, i
medium-nk-like  exogenous nu, a, z; endogenous p; thirteen controls

Every control loads on every state with a row of (A, B) that is not
proportional to any other row, including the endogenous-state row (C, D).
Presets simulate with observation noise unless told otherwise; without it
every control is an exact linear combination of the states.
All persistences are below 0.95.
"""

import logging
from typing import Callable, Dict, Optional

from ..config import section
from ..exceptions import ConfigError
from ..models.params import SimConfig, StateSpaceParams
from ..models.partition import StatePartition

logger = logging.getLogger(__name__)

# observation noise variance on endogenous states and controls
_NOISE_VAR = 0.01


def _small_rbc_like() -> StateSpaceParams:
    part = StatePartition(
        exo_states=("g", "z"),
        endo_states=("k",),
        controls=("w", "r", "y", "c", "l", "i"),
    )
    return StateSpaceParams(
        partition=part,
        E=[[0.80, 0.0], [0.0, 0.90]],
        C=[[0.85]],
        D=[[0.12, 0.35]],
        A=[[0.40], [-0.30], [0.35], [0.55], [-0.20], [0.25]],
        B=[
            [0.05, 0.90],
            [0.10, 1.20],
            [0.20, 1.40],
            [-0.15, 0.45],
            [0.25, 0.60],
            [0.50, 2.10],
        ],
        shock_variances={"g": 1.0, "z": 0.5, **{n: _NOISE_VAR for n in part.time_t_endogenous}},
    )


def _medium_nk_like() -> StateSpaceParams:
    part = StatePartition(
        exo_states=("nu", "a", "z"),
        endo_states=("p",),
        controls=(
            "y", "i", "pi", "y_gap", "r_nat", "r_real", "n",
            "m_real", "m_nominal", "w", "c", "w_real", "mu",
        ),
    )
    return StateSpaceParams(
        partition=part,
        E=[[0.50, 0.0, 0.0], [0.0, 0.90, 0.0], [0.0, 0.0, 0.50]],
        C=[[0.60]],
        D=[[0.30, -0.40, 0.20]],
        A=[
            [0.20], [0.35], [-0.40], [0.15], [0.05], [-0.25], [0.30],
            [-0.45], [0.55], [0.25], [0.18], [-0.35], [0.40],
        ],
        B=[
            [-0.80, 1.10, 0.40],
            [-1.50, 2.30, 0.10],
            [-0.60, -0.30, 0.25],
            [-0.90, 0.20, 0.45],
            [0.10, -0.70, 0.80],
            [0.90, 0.15, 0.30],
            [-0.85, -0.50, 0.35],
            [-1.20, 1.00, 0.20],
            [-1.80, 0.70, 0.45],
            [-0.40, 1.30, 0.15],
            [-0.75, 1.05, 0.55],
            [-0.50, 1.60, -0.20],
            [0.45, -1.25, -0.10],
        ],
        shock_variances={
            "nu": 0.25, "a": 1.0, "z": 0.5,
            **{n: _NOISE_VAR for n in part.time_t_endogenous},
        },
    )


PRESETS: Dict[str, Callable[[], StateSpaceParams]] = {
    "small-rbc-like": _small_rbc_like,
    "medium-nk-like": _medium_nk_like,
}


class PresetProvider:
    """Looks up built-in models by name."""

    def names(self):
        return sorted(PRESETS)

    def params(self, name: str) -> StateSpaceParams:
        try:
            builder = PRESETS[name]
        except KeyError:
            raise ConfigError(
                f"Unknown preset '{name}'; choose one of {', '.join(self.names())}"
            ) from None
        return builder()

    def preset(
        self,
        name: str,
        n: Optional[int] = None,
        seed: Optional[int] = None,
        observation_noise: bool = True,
    ) -> SimConfig:
        sim = section("simulation")
        config = SimConfig(
            params=self.params(name),
            n=int(sim.get("n", 100_000)) if n is None else n,
            seed=int(sim.get("seed", 0)) if seed is None else seed,
            observation_noise=observation_noise,
        )
        logger.debug("Preset %s: n=%d seed=%d", name, config.n, config.seed)
        return config


preset_provider = PresetProvider()
