import logging
from typing import List, NamedTuple, Optional

import numpy as np

from ..models.frame import TimeSeriesFrame
from ..models.params import SimConfig
from ..providers.preset_provider import preset_provider

logger = logging.getLogger(__name__)


class ShockDraw(NamedTuple):
    exo: np.ndarray  # (burn_in + n, |z|), already scaled by the shock s.d.
    observation: Optional[np.ndarray]  # (burn_in + n, |x| + |y|) or None


def replication_seeds(master_seed: int, reps: int) -> List[int]:
    """Independent 64-bit seeds for ``reps`` replications derived from one master seed."""
    children = np.random.SeedSequence(master_seed).spawn(reps)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


class SimulationService:
    """Generates observations from a configured state-space model.

    Draw order is fixed: one PCG64 generator seeded with ``cfg.seed`` first
    fills every exogenous shock (periods outer, exogenous states inner),
    then, only with observation noise, every x/y noise term.
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def preset(self, name: str, n: Optional[int] = None, seed: Optional[int] = None, observation_noise: bool = True) -> SimConfig:
        """Simulation settings for a built-in model (see providers.preset_provider)."""
        return preset_provider.preset(name, n=n, seed=seed, observation_noise=observation_noise)

    def draw_shocks(self, cfg: SimConfig) -> ShockDraw:
        part = cfg.partition
        total = cfg.burn_in + cfg.n
        rng = np.random.default_rng(cfg.seed)
        exo = rng.standard_normal((total, part.n_exo)) * cfg.params.shock_sd(part.exo_states)
        observation = None
        if cfg.observation_noise:
            names = part.endo_states + part.controls
            observation = rng.standard_normal((total, len(names))) * cfg.params.shock_sd(names)
        return ShockDraw(exo, observation)

    def simulate(self, cfg: SimConfig) -> TimeSeriesFrame:
        """Run the recursion from zero initial conditions and drop the burn-in.

        Columns follow the partition order: exogenous, endogenous, controls.
        """
        params = cfg.params
        part = cfg.partition
        shocks = self.draw_shocks(cfg)
        total = cfg.burn_in + cfg.n
        e = params.e_diag
        n_x = part.n_endo

        out = np.empty((total, part.k))
        z = np.zeros(part.n_exo)
        x = np.zeros(n_x)
        for t in range(total):
            x_prev = x
            z = e * z + shocks.exo[t]
            x = params.C @ x_prev + params.D @ z
            y = params.A @ x_prev + params.B @ z
            if shocks.observation is not None:
                # state noise persists through C; control noise does not propagate
                x = x + shocks.observation[t, :n_x]
                y = y + shocks.observation[t, n_x:]
            out[t, : part.n_exo] = z
            out[t, part.n_exo:part.n_exo + n_x] = x
            out[t, part.n_exo + n_x:] = y

        self.logger.info(
            "Simulated %d rows (burn-in %d) of %d observables, seed=%d",
            cfg.n, cfg.burn_in, part.k, cfg.seed,
        )
        return TimeSeriesFrame(names=part.names, values=out[cfg.burn_in:])
