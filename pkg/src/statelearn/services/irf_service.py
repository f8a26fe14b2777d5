import logging
from typing import Optional, Sequence

import numpy as np

from ..exceptions import ConfigError, InsufficientRowsError, NonStationaryError
from ..models.frame import TimeSeriesFrame
from ..models.irf import IrfPath, IrfRequest, Var1Fit
from ..models.params import spectral_radius
from ..utils.linalg import centered_least_squares

logger = logging.getLogger(__name__)


class IrfService:
    """Impulse responses of fitted state-space models and of an unrestricted VAR(1)."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def irf_statespace(self, req: IrfRequest) -> IrfPath:
        """Propagate an impulse through the state-space equations with zero future shocks.

        Period 0 is impact. An exogenous impulse moves z_0 and, through D and
        B, x_0 and y_0. An endogenous impulse sets x_0 only; controls first
        respond in period 1 because they read x_{t-1}.

        Returns:
            IrfPath with ``req.horizon`` rows and one column per observable
        """
        params = req.params
        part = params.partition
        if spectral_radius(params.C) >= 1.0:
            raise NonStationaryError("Cannot propagate an impulse through a non-stationary C")

        z = np.zeros(part.n_exo)
        x_impulse = np.zeros(part.n_endo)
        for name, magnitude in req.impulses().items():
            if name in part.exo_states:
                j = part.exo_states.index(name)
                scale = float(params.shock_sd([name])[0]) if req.scale_by_sd else 1.0
                z[j] += magnitude * scale
            else:
                j = part.endo_states.index(name)
                scale = float(params.shock_sd([name])[0]) if req.scale_by_sd else 1.0
                x_impulse[j] += magnitude * scale

        e = params.e_diag
        out = np.empty((req.horizon, part.k))
        x_prev = np.zeros(part.n_endo)
        for h in range(req.horizon):
            if h > 0:
                z = e * z
            x = params.C @ x_prev + params.D @ z
            y = params.A @ x_prev + params.B @ z
            if h == 0:
                x = x + x_impulse
            out[h] = np.concatenate([z, x, y])
            x_prev = x
        return IrfPath(names=part.names, responses=out, shocked=req.shocked)

    def fit_var1(self, frame: TimeSeriesFrame) -> Var1Fit:
        """Least squares of every variable on all first lags, with intercept.

        Raises:
            InsufficientRowsError: fewer than k + 3 rows
            DegenerateDesignError: the lag matrix is rank deficient
        """
        values = frame.values
        if frame.n_rows < frame.k + 3:
            raise InsufficientRowsError(frame.n_rows, frame.k + 3)
        lags = values[:-1]
        current = values[1:]
        fit = centered_least_squares(current, lags, column_names=[f"{n}[t-1]" for n in frame.names])
        t_eff = current.shape[0]
        cov = fit.residuals.T @ fit.residuals / t_eff
        self.logger.debug("VAR(1) on %d rows, spectral radius %.4f", t_eff, spectral_radius(fit.coef.T))
        return Var1Fit(names=frame.names, coef=fit.coef.T, residual_cov=cov, t_eff=t_eff)

    def irf_var1(
        self,
        coef: np.ndarray,
        shock: np.ndarray,
        horizon: int,
        names: Optional[Sequence[str]] = None,
        allow_nonstationary: bool = False,
        shocked: str = "",
    ) -> IrfPath:
        """path_h = coef^h @ shock for h = 0 .. horizon-1 (plain, non-orthogonalised shocks)."""
        coef = np.asarray(coef, dtype=float)
        shock = np.asarray(shock, dtype=float).ravel()
        k = coef.shape[0]
        if coef.shape != (k, k) or shock.shape != (k,):
            raise ConfigError(f"coef must be square and match the shock length {shock.shape[0]}")
        if horizon < 1:
            raise ConfigError("horizon must be at least 1")
        rho = spectral_radius(coef)
        if rho >= 1.0 and not allow_nonstationary:
            raise NonStationaryError(f"VAR(1) spectral radius {rho:.4f} >= 1")

        out = np.empty((horizon, k))
        current = shock.copy()
        for h in range(horizon):
            out[h] = current
            current = coef @ current
        if names is None:
            names = [f"v{i}" for i in range(k)]
        return IrfPath(names=tuple(names), responses=out, shocked=shocked)
