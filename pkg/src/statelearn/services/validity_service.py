import logging
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import section
from ..exceptions import ConfigError, DataError
from ..models.frame import LaggedDesign, VarRef
from ..models.partition import StatePartition
from ..models.reports import CheckRecord, CiObligation, ScoreReport, Strategy, ValidityReport
from ..utils.linalg import center
from .scoring_service import ScoringService
from .stats_service import StatsService

logger = logging.getLogger(__name__)


def _refs(names, lag: int) -> Tuple[VarRef, ...]:
    return tuple(VarRef(name=n, lag=lag) for n in names)


class ValidityService:
    """Checks whether a candidate partition is consistent with the data."""

    def __init__(
        self,
        stats_service: Optional[StatsService] = None,
        scoring_service: Optional[ScoringService] = None,
        include_endo_lagexo: Optional[bool] = None,
    ):
        self.logger = logging.getLogger(__name__)
        self.stats = stats_service or StatsService()
        self.scoring = scoring_service or ScoringService()
        self.include_endo_lagexo = (
            bool(section("validity").get("include_endo_lagexo", True))
            if include_endo_lagexo is None
            else include_endo_lagexo
        )

    def generate_obligations(
        self, part: StatePartition, include_endo_lagexo: Optional[bool] = None
    ) -> List[CiObligation]:
        """Independences implied by a partition, in a fixed order.

        1. pairs of time-t endogenous variables given [x_{t-1}, z_t]
        2. lagged endogenous states against current exogenous states given z_{t-1}
        3. time-t endogenous variables against lagged exogenous states given [x_{t-1}, z_t]
        4. pairs of current exogenous states given z_{t-1}
        """
        include = self.include_endo_lagexo if include_endo_lagexo is None else include_endo_lagexo
        state_cond = _refs(part.endo_states, 1) + _refs(part.exo_states, 0)
        exo_cond = _refs(part.exo_states, 1)
        endo_t = _refs(part.time_t_endogenous, 0)

        out: List[CiObligation] = [
            CiObligation(kind="endo-pair", var_a=a, var_b=b, conditioning=state_cond)
            for a, b in combinations(endo_t, 2)
        ]
        out += [
            CiObligation(kind="lagstate-exo", var_a=x, var_b=z, conditioning=exo_cond)
            for x in _refs(part.endo_states, 1)
            for z in _refs(part.exo_states, 0)
        ]
        if include:
            out += [
                CiObligation(kind="endo-lagexo", var_a=w, var_b=z, conditioning=state_cond)
                for w in endo_t
                for z in _refs(part.exo_states, 1)
            ]
        out += [
            CiObligation(kind="exo-pair", var_a=a, var_b=b, conditioning=exo_cond)
            for a, b in combinations(_refs(part.exo_states, 0), 2)
        ]
        return out

    def untestable(
        self, part: StatePartition, strategy: Strategy, alpha: float, reason: str
    ) -> ValidityReport:
        self.logger.debug("Candidate %s untestable: %s", part.encode(), reason)
        return ValidityReport(
            partition=part,
            strategy=strategy,
            sig_level_used=alpha,
            valid=False,
            untestable_reason=reason,
        )

    def check_multiple(
        self,
        design: LaggedDesign,
        part: StatePartition,
        alpha: float,
        guard_tol: Optional[float] = None,
        include_endo_lagexo: Optional[bool] = None,
    ) -> ValidityReport:
        """Run every implied partial-correlation test with a Bonferroni level alpha / #tests.

        Residuals are computed once per distinct conditioning set.
        """
        obligations = self.generate_obligations(part, include_endo_lagexo)
        try:
            score = self.scoring.score_design(design)
            residuals = self._residuals_by_conditioning(design, obligations)
        except DataError as e:
            return self.untestable(part, "multiple", alpha, str(e))

        records = []
        for ob in obligations:
            res, raw_var, col = residuals[ob.conditioning]
            ia, ib = col[ob.var_a], col[ob.var_b]
            test = self.stats.pair_test(
                res[:, ia], res[:, ib], raw_var[ia], raw_var[ib], len(ob.conditioning),
                guard_tol, (ob.var_a.label, ob.var_b.label), [r.label for r in ob.conditioning],
            )
            records.append(
                CheckRecord(
                    kind=ob.kind,
                    label=ob.label,
                    p_value=test.p_value,
                    statistic=test.t_stat,
                    guard_triggered=test.guard_triggered,
                )
            )

        sig = alpha / len(records) if records else alpha
        valid = all(r.p_value > sig for r in records)
        return ValidityReport(
            partition=part,
            strategy="multiple",
            tests=tuple(records),
            sig_level_used=sig,
            valid=valid,
            log_likelihood=score.log_likelihood,
            score=score,
        )

    def _residuals_by_conditioning(self, design: LaggedDesign, obligations: List[CiObligation]):
        needed: Dict[Tuple[VarRef, ...], List[VarRef]] = {}
        for ob in obligations:
            cols = needed.setdefault(ob.conditioning, [])
            for ref in (ob.var_a, ob.var_b):
                if ref not in cols:
                    cols.append(ref)

        out = {}
        for cond, refs in needed.items():
            targets = design.matrix(refs)
            raw_var = np.mean(center(targets) ** 2, axis=0)
            flat = [r.label for r, v in zip(refs, raw_var) if v == 0.0]
            if flat:
                raise DataError("Zero-variance series cannot be tested: " + ", ".join(flat))
            res = self.stats.residualize(targets, design.matrix(cond), [r.label for r in cond])
            out[cond] = (res, raw_var, {ref: i for i, ref in enumerate(refs)})
        return out

    def srivastava_vector(self, design: LaggedDesign, include_lag2_exo: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        """Stacked [y_{t-1}, x_{t-1}, z_t] and its conditioning block [x_{t-2}, z_{t-1}]."""
        blocks = [design.y_lag1, design.x_lag1, design.z_t]
        if include_lag2_exo:
            blocks.append(design.z_lag2)
        return np.hstack(blocks), np.hstack([design.x_lag2, design.z_lag1])

    def check_srivastava(
        self,
        design: LaggedDesign,
        part: StatePartition,
        alpha: float,
        include_lag2_exo: bool = False,
    ) -> ValidityReport:
        """Single test that the residual covariance of the stacked vector is diagonal."""
        vector, cond = self.srivastava_vector(design, include_lag2_exo)
        if vector.shape[1] < 2:
            raise ConfigError("Diagonal-covariance strategy needs at least 2 observables")
        try:
            score = self.scoring.score_design(design)
            cond_names = [f"{n}[t-2]" for n in part.endo_states] + [f"{n}[t-1]" for n in part.exo_states]
            res = self.stats.residualize(vector, cond, cond_names)
            stat = self.stats.srivastava_test(res, alpha, n_coefficients=cond.shape[1] + 1)
        except DataError as e:
            return self.untestable(part, "srivastava", alpha, str(e))

        record = CheckRecord(
            kind="srivastava",
            label="diag cov [y[t-1], x[t-1], z[t]] | x[t-2], z[t-1]",
            p_value=stat.p_value,
            statistic=stat.t3,
        )
        return ValidityReport(
            partition=part,
            strategy="srivastava",
            tests=(record,),
            sig_level_used=alpha,
            valid=not stat.rejected,
            log_likelihood=score.log_likelihood,
            score=score,
        )

    def score_only(self, design: LaggedDesign, part: StatePartition, alpha: float) -> ValidityReport:
        try:
            score: ScoreReport = self.scoring.score_design(design)
        except DataError as e:
            return self.untestable(part, "score-only", alpha, str(e))
        return ValidityReport(
            partition=part,
            strategy="score-only",
            sig_level_used=alpha,
            valid=True,
            log_likelihood=score.log_likelihood,
            score=score,
        )

    def evaluate(
        self,
        design: LaggedDesign,
        part: StatePartition,
        strategy: Strategy,
        alpha: float,
        guard_tol: Optional[float] = None,
        include_endo_lagexo: Optional[bool] = None,
        include_lag2_exo: bool = False,
    ) -> ValidityReport:
        if strategy == "multiple":
            return self.check_multiple(design, part, alpha, guard_tol, include_endo_lagexo)
        if strategy == "srivastava":
            return self.check_srivastava(design, part, alpha, include_lag2_exo)
        if strategy == "score-only":
            return self.score_only(design, part, alpha)
        raise ConfigError(f"Unknown strategy '{strategy}'")
