import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import section
from ..exceptions import ConfigError
from ..models.frame import LaggedDesign, TimeSeriesFrame
from ..models.partition import StatePartition
from ..models.reports import ScoreKey, ScoreReport
from .design_service import DesignService

logger = logging.getLogger(__name__)

# Shorthand reference into the config.json section
_scoring = section("scoring")

_LOG_2PI = math.log(2.0 * math.pi)


class ScoringService:
    """Service for the Gaussian likelihood and information criteria of a candidate"""

    def __init__(self, design_service: Optional[DesignService] = None, sigma2_floor: Optional[float] = None):
        self.logger = logging.getLogger(__name__)
        self.design = design_service or DesignService()
        self.sigma2_floor = (
            float(_scoring.get("sigma2_floor", 1e-300)) if sigma2_floor is None else sigma2_floor
        )

    @staticmethod
    def count_params(part: StatePartition) -> int:
        """Free coefficients: A, B, C, D, diagonal E, plus one variance per observable."""
        y, x, z = len(part.controls), part.n_endo, part.n_exo
        return y * x + y * z + x * x + x * z + z + part.k

    def log_likelihood(self, sigma2: Sequence[float], t_eff: int) -> float:
        """Concentrated Gaussian log-likelihood for independent equations.

        L = -T/2 * (k (1 + ln 2pi) + sum_i ln sigma2_i)
        """
        floored = np.maximum(np.asarray(sigma2, dtype=float), self.sigma2_floor)
        k = floored.size
        return float(-0.5 * t_eff * (k * (1.0 + _LOG_2PI) + np.sum(np.log(floored))))

    def score_design(self, design: LaggedDesign) -> ScoreReport:
        part = design.partition
        variances = self.design.residual_variances(design)
        names = part.names
        sigma2 = tuple(max(variances[n], self.sigma2_floor) for n in names)
        t_eff = design.t_eff
        loglik = self.log_likelihood(sigma2, t_eff)
        n_params = self.count_params(part)
        return ScoreReport(
            log_likelihood=loglik,
            bic=-2.0 * loglik + n_params * math.log(t_eff),
            aic=-2.0 * loglik + 2.0 * n_params,
            n_params=n_params,
            t_eff=t_eff,
            equation_names=names,
            per_equation_sigma2=sigma2,
        )

    def score(self, frame: TimeSeriesFrame, part: StatePartition) -> ScoreReport:
        """Fit every equation of ``part`` on ``frame`` and score the result."""
        return self.score_design(self.design.build_lagged_design(frame, part))

    def compare(
        self,
        candidates: Sequence[Tuple[ScoreReport, StatePartition]],
        key: Optional[ScoreKey] = None,
    ) -> List[Tuple[ScoreReport, StatePartition]]:
        """Rank candidates best first.

        Log-likelihood ranks descending, BIC and AIC ascending; ties fall back
        to the canonical partition encoding.
        """
        key = key or _scoring.get("default_key", "loglik")
        if key not in ("loglik", "bic", "aic"):
            raise ConfigError(f"Unknown score key '{key}'")
        sign = -1.0 if key == "loglik" else 1.0
        ranked = sorted(
            candidates,
            key=lambda pair: (sign * pair[0].value(key), pair[1].canonical_key()),
        )
        if ranked:
            self.logger.debug("Best by %s: %s", key, ranked[0][1].encode())
        return ranked
