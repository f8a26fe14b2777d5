"""Least squares on centered data via pivoted QR."""

import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from ..config import section
from ..exceptions import DegenerateDesignError

logger = logging.getLogger(__name__)


class LeastSquaresFit(NamedTuple):
    coef: np.ndarray  # (p, m)
    residuals: np.ndarray  # (n, m), orthogonal to the centered regressors


def center(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return a.copy()
    return a - a.mean(axis=0)


def centered_least_squares(
    targets: np.ndarray,
    regressors: Optional[np.ndarray],
    rank_tol: Optional[float] = None,
    column_names: Optional[Sequence[str]] = None,
) -> LeastSquaresFit:
    """Regress centered targets on centered regressors (intercept implied).

    Args:
        targets: (n, m) or (n,) array
        regressors: (n, p) array, or None / zero columns for a pure centering
        rank_tol: relative pivot tolerance; defaults to ``linalg.rank_tol``
        column_names: regressor labels used in the rank-deficiency error

    Returns:
        LeastSquaresFit with coefficients in the original column order

    Raises:
        DegenerateDesignError: regressors are rank deficient after centering
    """
    y = center(np.atleast_1d(targets))
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    n, m = y.shape
    if regressors is None or np.asarray(regressors).size == 0:
        coef = np.zeros((0, m))
        return LeastSquaresFit(coef, y[:, 0] if squeeze else y)

    x = center(regressors)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != n:
        raise ValueError(f"targets have {n} rows, regressors {x.shape[0]}")
    p = x.shape[1]
    tol = float(section("linalg").get("rank_tol", 1e-10)) if rank_tol is None else rank_tol

    q, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(r))
    scale = pivots[0] if pivots.size else 0.0
    rank = int(np.sum(pivots > tol * scale)) if scale > 0 else 0
    if rank < p:
        names = list(column_names) if column_names is not None else [f"col{i}" for i in range(p)]
        dependent = [names[i] for i in piv[rank:]]
        logger.debug("Rank %d < %d; dependent columns %s", rank, p, dependent)
        raise DegenerateDesignError(dependent)

    qty = q.T @ y
    coef_pivoted = scipy.linalg.solve_triangular(r, qty)
    coef = np.empty_like(coef_pivoted)
    coef[piv] = coef_pivoted
    residuals = y - q @ qty
    if squeeze:
        return LeastSquaresFit(coef, residuals[:, 0])
    return LeastSquaresFit(coef, residuals)
