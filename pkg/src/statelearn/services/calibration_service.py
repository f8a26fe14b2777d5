import logging
from itertools import product
from typing import List, Optional

import numpy as np
import scipy.linalg

from ..models.reports import CalibrationGrid, CalibrationRow
from .stats_service import StatsService

logger = logging.getLogger(__name__)


def equicorrelation(m: int, rho: float) -> np.ndarray:
    """(1 - rho) I + rho 11'."""
    return (1.0 - rho) * np.eye(m) + rho * np.ones((m, m))


class CalibrationService:
    """Empirical size and power of the diagonal-covariance test on Gaussian draws."""

    def __init__(self, stats_service: Optional[StatsService] = None):
        self.logger = logging.getLogger(__name__)
        self.stats = stats_service or StatsService()

    def rejection_rate(self, alpha: float, n: int, m: int, rho: float, reps: int, rng: np.random.Generator) -> float:
        chol = scipy.linalg.cholesky(equicorrelation(m, rho), lower=True)
        rejected = 0
        for _ in range(reps):
            sample = rng.standard_normal((n, m)) @ chol.T
            # only the sample mean is estimated
            if self.stats.srivastava_test(sample, alpha, n_coefficients=1).rejected:
                rejected += 1
        return rejected / reps

    def run(self, grid: Optional[CalibrationGrid] = None) -> List[CalibrationRow]:
        """One row per (alpha, n, m, correlation) cell, cells in that nested order.

        Each cell draws from its own generator spawned from ``grid.seed``.
        """
        grid = grid or CalibrationGrid()
        cells = list(product(grid.alpha, grid.n, grid.m, grid.correlation))
        children = np.random.SeedSequence(grid.seed).spawn(len(cells))
        rows = []
        for (alpha, n, m, rho), child in zip(cells, children):
            rate = self.rejection_rate(alpha, n, m, rho, grid.repetitions, np.random.default_rng(child))
            rows.append(
                CalibrationRow(
                    kind="size" if rho == 0.0 else "power",
                    empirical_rate=rate,
                    alpha=alpha,
                    difference=rate - alpha,
                    n=n,
                    correlation=rho,
                    m=m,
                    repetitions=grid.repetitions,
                )
            )
            self.logger.info("alpha=%s n=%d m=%d rho=%s: rejection rate %.4f", alpha, n, m, rho, rate)
        return rows
