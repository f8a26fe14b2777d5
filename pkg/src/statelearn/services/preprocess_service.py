import logging

import numpy as np

from ..exceptions import ConstantColumnError
from ..models.frame import TimeSeriesFrame
from ..utils.linalg import centered_least_squares

logger = logging.getLogger(__name__)


class PreprocessService:
    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def detrend(self, frame: TimeSeriesFrame) -> TimeSeriesFrame:
        """Replace each column by the demeaned residuals of its own AR(1) with intercept.

        The first row is consumed by the lag, so the result has T - 1 rows.
        """
        values = frame.values
        out = np.empty((frame.n_rows - 1, frame.k))
        for j, name in enumerate(frame.names):
            col = values[:, j]
            if np.ptp(col) == 0.0:
                raise ConstantColumnError(name)
            fit = centered_least_squares(col[1:], col[:-1, None], column_names=[f"{name}[t-1]"])
            resid = fit.residuals
            out[:, j] = resid - resid.mean()
            self.logger.debug("Detrended %s: AR coefficient %.4f", name, fit.coef[0, 0])
        self.logger.info("Detrended %d columns, %d rows kept", frame.k, out.shape[0])
        return TimeSeriesFrame(names=frame.names, values=out)
