import logging
from typing import Dict, NamedTuple, Optional

import numpy as np

from ..config import section
from ..exceptions import NonStationaryError, UnknownVariableError
from ..models.frame import LaggedDesign, TimeSeriesFrame
from ..models.params import StateSpaceParams
from ..models.partition import StatePartition
from ..utils.linalg import centered_least_squares

logger = logging.getLogger(__name__)


class EquationFit(NamedTuple):
    """Per-block regressions of one candidate.

    ``state_coef`` stacks [x_{t-1}; z_t] coefficients for every time-t
    endogenous variable (endogenous states first, then controls).
    """

    state_coef: np.ndarray
    state_residuals: np.ndarray
    exo_coef: np.ndarray
    exo_residuals: np.ndarray


class DesignService:
    """Builds lagged designs and fits the first-order state-space equations."""

    def __init__(self, rank_tol: Optional[float] = None):
        self.logger = logging.getLogger(__name__)
        self.rank_tol = (
            float(section("linalg").get("rank_tol", 1e-10)) if rank_tol is None else rank_tol
        )

    def build_lagged_design(self, frame: TimeSeriesFrame, part: StatePartition) -> LaggedDesign:
        """Slice the frame into current, one-lag and two-lag blocks.

        Row i of the result is frame row i+2. Every frame column must have
        a role, and every role must name a frame column.
        """
        unknown = [n for n in part.names if n not in frame.names]
        if unknown:
            raise UnknownVariableError(unknown)
        uncovered = [n for n in frame.names if n not in part.names]
        if uncovered:
            raise UnknownVariableError(uncovered)
        values = frame.values
        y = values[:, frame.indices(part.controls)]
        x = values[:, frame.indices(part.endo_states)]
        z = values[:, frame.indices(part.exo_states)]

        def lag(block: np.ndarray, ell: int) -> np.ndarray:
            return block[2 - ell: block.shape[0] - ell]

        return LaggedDesign.model_construct(
            partition=part,
            **{
                name: _frozen(arr)
                for name, arr in {
                    "y_t": lag(y, 0),
                    "x_t": lag(x, 0),
                    "z_t": lag(z, 0),
                    "y_lag1": lag(y, 1),
                    "x_lag1": lag(x, 1),
                    "z_lag1": lag(z, 1),
                    "x_lag2": lag(x, 2),
                    "z_lag2": lag(z, 2),
                }.items()
            },
        )

    def fit_equations(self, design: LaggedDesign) -> EquationFit:
        """Controls and endogenous states on [x_{t-1}, z_t]; each exogenous state on its own lag."""
        part = design.partition
        regressors = np.hstack([design.x_lag1, design.z_t])
        reg_names = [f"{n}[t-1]" for n in part.endo_states] + [f"{n}[t]" for n in part.exo_states]
        targets = np.hstack([design.x_t, design.y_t])
        state = centered_least_squares(targets, regressors, self.rank_tol, reg_names)

        exo_coef = np.zeros(part.n_exo)
        exo_res = np.empty_like(design.z_t)
        for j, name in enumerate(part.exo_states):
            fit = centered_least_squares(
                design.z_t[:, j], design.z_lag1[:, [j]], self.rank_tol, [f"{name}[t-1]"]
            )
            exo_coef[j] = fit.coef[0, 0]
            exo_res[:, j] = fit.residuals
        return EquationFit(state.coef, state.residuals, exo_coef, exo_res)

    def residual_variances(self, design: LaggedDesign, fit: Optional[EquationFit] = None) -> Dict[str, float]:
        """MLE residual variance (divisor T_eff) per equation, keyed by variable."""
        if fit is None:
            fit = self.fit_equations(design)
        part = design.partition
        out: Dict[str, float] = {}
        for j, name in enumerate(part.exo_states):
            out[name] = float(np.mean(fit.exo_residuals[:, j] ** 2))
        for j, name in enumerate(part.time_t_endogenous):
            out[name] = float(np.mean(fit.state_residuals[:, j] ** 2))
        return out

    def fit_params(self, frame: TimeSeriesFrame, part: StatePartition) -> StateSpaceParams:
        """Least-squares estimates of A, B, C, D, E and the shock variances.

        Raises:
            DegenerateDesignError: a regressor block is rank deficient
            NonStationaryError: a fitted exogenous persistence has |e_ii| >= 1
        """
        design = self.build_lagged_design(frame, part)
        fit = self.fit_equations(design)
        s = part.n_endo
        coef_t = fit.state_coef.T  # rows: x then y; cols: x_{t-1} then z_t
        c_mat, d_mat = coef_t[:s, :s], coef_t[:s, s:]
        a_mat, b_mat = coef_t[s:, :s], coef_t[s:, s:]

        bad = [n for n, e in zip(part.exo_states, fit.exo_coef) if abs(e) >= 1.0]
        if bad:
            raise NonStationaryError(
                "Fitted exogenous persistence |e_ii| >= 1 for " + ", ".join(bad)
            )

        floor = float(section("scoring").get("sigma2_floor", 1e-300))
        variances = {
            name: max(var, floor) for name, var in self.residual_variances(design, fit).items()
        }
        self.logger.debug("Fitted %s on %d rows", part.encode(), design.t_eff)
        return StateSpaceParams(
            partition=part,
            A=a_mat,
            B=b_mat,
            C=c_mat,
            D=d_mat,
            E=np.diag(fit.exo_coef),
            shock_variances=variances,
        )


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out

