import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from ..config import section
from ..exceptions import ConfigError, DataError, DegenerateInputError, InsufficientRowsError
from ..models.reports import PartialCorrTest, SrivastavaStat
from ..utils.linalg import center, centered_least_squares

logger = logging.getLogger(__name__)

_stats = section("stats")


class StatsService:
    """Conditional-independence tests on regression residuals."""

    def __init__(
        self,
        guard_tol: Optional[float] = None,
        rank_tol: Optional[float] = None,
        dof_adjust: Optional[bool] = None,
        min_denominator: Optional[float] = None,
    ):
        self.logger = logging.getLogger(__name__)
        self.guard_tol = float(_stats.get("guard_tol", 1e-10)) if guard_tol is None else guard_tol
        self.rank_tol = rank_tol
        self.dof_adjust = (
            bool(_stats.get("srivastava_dof_adjust", True)) if dof_adjust is None else dof_adjust
        )
        self.min_denominator = (
            float(_stats.get("srivastava_min_denominator", 1e-12))
            if min_denominator is None
            else min_denominator
        )

    def residualize(
        self,
        targets: np.ndarray,
        regressors: Optional[np.ndarray],
        column_names: Optional[Sequence[str]] = None,
    ) -> np.ndarray:
        """Residuals of centered ``targets`` after projecting out centered ``regressors``.

        Keeps the shape of ``targets``; an empty regressor set only centers.
        """
        return centered_least_squares(targets, regressors, self.rank_tol, column_names).residuals

    def pair_test(
        self,
        res_a: np.ndarray,
        res_b: np.ndarray,
        raw_var_a: float,
        raw_var_b: float,
        n_conditioning: int,
        guard_tol: Optional[float] = None,
        labels: Sequence[str] = ("a", "b"),
        conditioning_labels: Sequence[str] = (),
    ) -> PartialCorrTest:
        """t-test of the correlation between two residual series.

        When either residual variance is below ``guard_tol`` times the raw
        variance of its series the pair is treated as independent (p = 1).
        """
        tol = self.guard_tol if guard_tol is None else guard_tol
        n = res_a.shape[0]
        df = n - n_conditioning - 2
        ss_a = float(res_a @ res_a)
        ss_b = float(res_b @ res_b)
        if ss_a / n < tol * raw_var_a or ss_b / n < tol * raw_var_b:
            return PartialCorrTest(
                var_a=labels[0],
                var_b=labels[1],
                conditioning=tuple(conditioning_labels),
                df=df,
                p_value=1.0,
                guard_triggered=True,
            )

        r = float(np.clip((res_a @ res_b) / math.sqrt(ss_a * ss_b), -1.0, 1.0))
        if abs(r) == 1.0:
            t_stat, p_value = math.copysign(math.inf, r), 0.0
        else:
            t_stat = r * math.sqrt(df / (1.0 - r * r))
            p_value = float(min(1.0, 2.0 * stats.t.sf(abs(t_stat), df)))
        return PartialCorrTest(
            var_a=labels[0],
            var_b=labels[1],
            conditioning=tuple(conditioning_labels),
            r=r,
            t_stat=t_stat,
            df=df,
            p_value=p_value,
        )

    def partial_corr_test(
        self,
        a: np.ndarray,
        b: np.ndarray,
        conditioning: Optional[np.ndarray] = None,
        guard_tol: Optional[float] = None,
        labels: Sequence[str] = ("a", "b"),
        conditioning_labels: Optional[Sequence[str]] = None,
    ) -> PartialCorrTest:
        """Test a _||_ b | conditioning with a Student-t on the partial correlation.

        Args:
            a, b: series of equal length n
            conditioning: (n, c) matrix, or None for a plain correlation test
            guard_tol: relative residual-variance floor (default from config)

        Raises:
            InsufficientRowsError: n <= c + 3
            DegenerateInputError: a or b has zero raw variance
            DegenerateDesignError: conditioning is rank deficient
        """
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        n = a.shape[0]
        if b.shape[0] != n:
            raise ValueError("a and b must have the same length")
        cond = None if conditioning is None else np.asarray(conditioning, dtype=float)
        if cond is not None and cond.ndim == 1:
            cond = cond[:, None]
        c = 0 if cond is None else cond.shape[1]
        if n <= c + 3:
            raise InsufficientRowsError(n, c + 4)

        raw = center(np.column_stack([a, b]))
        raw_var = np.mean(raw ** 2, axis=0)
        if raw_var[0] == 0.0 or raw_var[1] == 0.0:
            raise DegenerateInputError("Cannot test a series with zero variance")
        if conditioning_labels is None:
            conditioning_labels = [f"c{i}" for i in range(c)]
        res = self.residualize(np.column_stack([a, b]), cond, conditioning_labels)
        return self.pair_test(
            res[:, 0], res[:, 1], float(raw_var[0]), float(raw_var[1]), c,
            guard_tol, labels, conditioning_labels,
        )

    def srivastava_test(
        self, residuals: np.ndarray, alpha: float, n_coefficients: int = 0
    ) -> SrivastavaStat:
        """Test that the covariance of a residual vector is diagonal.

        Args:
            residuals: (rows, p) matrix, p >= 2
            alpha: level reported through ``SrivastavaStat.rejected``
            n_coefficients: coefficients already estimated per column (intercept
                included); subtracted from the sample size when dof adjustment is on

        Returns:
            SrivastavaStat whose t3 is asymptotically standard normal under the null
        """
        x = np.asarray(residuals, dtype=float)
        if x.ndim != 2:
            raise ValueError("residuals must be a 2-D matrix")
        rows, p = x.shape
        if p < 2:
            raise ConfigError(f"Diagonal-covariance test needs at least 2 columns, got {p}")
        if not np.isfinite(x).all():
            raise DataError("Residual matrix contains non-finite values")
        if rows < p + 2:
            raise InsufficientRowsError(rows, p + 2)
        n = rows - n_coefficients if self.dof_adjust else rows
        if n < 2:
            raise InsufficientRowsError(rows, n_coefficients + 2)

        xc = center(x)
        s = xc.T @ xc / n
        diag = np.diag(s)
        sum_s2 = float(np.sum(diag ** 2))
        if sum_s2 == 0.0:
            raise DegenerateInputError("All residual columns have zero variance")
        sum_s4 = float(np.sum(diag ** 4))
        tr_s = float(np.sum(diag))
        tr_s2 = float(np.sum(s * s))

        gamma3 = n / (n - 1) * (tr_s2 - tr_s ** 2 / n) / sum_s2
        a20 = n / (p * (n + 2)) * sum_s2
        a40 = sum_s4 / p
        denominator = 1.0 - (a40 / a20 ** 2) / p
        substituted = False
        if denominator < 0.0:
            denominator = 1.0 - sum_s4 / sum_s2 ** 2
            substituted = True

        if denominator <= self.min_denominator:
            self.logger.debug("Diagonal-covariance statistic degenerate (denominator %.3g)", denominator)
            return SrivastavaStat(
                t3=0.0, gamma3=gamma3, a20=a20, a40=a40, p=p, n_eff=n, p_value=1.0,
                alpha=alpha, denominator_substituted=substituted, degenerate=True,
            )

        t3 = (n / 2.0) * (gamma3 - 1.0) / math.sqrt(denominator)
        p_value = float(min(1.0, 2.0 * stats.norm.sf(abs(t3))))
        return SrivastavaStat(
            t3=t3, gamma3=gamma3, a20=a20, a40=a40, p=p, n_eff=n, p_value=p_value,
            alpha=alpha, denominator_substituted=substituted,
        )
