import numpy as np
import pytest

from src.statelearn.exceptions import DegenerateDesignError
from src.statelearn.utils.linalg import center, centered_least_squares


def test_residuals_orthogonal_to_regressors():
    """Residuals are centered and orthogonal to the regressors"""
    rng = np.random.default_rng(0)
    x = rng.standard_normal((300, 3))
    y = x @ np.array([[1.0], [-2.0], [0.5]]) + 3.0 + rng.standard_normal((300, 1))
    fit = centered_least_squares(y, x)
    assert np.max(np.abs(center(x).T @ fit.residuals)) < 1e-8
    assert abs(fit.residuals.mean()) < 1e-10
    np.testing.assert_allclose(fit.coef[:, 0], [1.0, -2.0, 0.5], atol=0.2)


def test_coefficients_in_original_column_order():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((200, 3)) * np.array([0.01, 10.0, 1.0])
    y = x @ np.array([5.0, 0.2, -1.0])
    fit = centered_least_squares(y, x)
    np.testing.assert_allclose(fit.coef[:, 0], [5.0, 0.2, -1.0], rtol=1e-8)


def test_empty_regressors_only_center():
    y = np.array([1.0, 2.0, 3.0, 6.0])
    fit = centered_least_squares(y, None)
    np.testing.assert_allclose(fit.residuals, y - 3.0)
    assert fit.coef.shape == (0, 1)


def test_duplicate_column_is_named():
    """The dependent column is reported"""
    rng = np.random.default_rng(2)
    a = rng.standard_normal(100)
    x = np.column_stack([a, rng.standard_normal(100), a])
    with pytest.raises(DegenerateDesignError) as err:
        centered_least_squares(rng.standard_normal(100), x, column_names=["a", "b", "a_copy"])
    assert len(err.value.columns) == 1
    assert err.value.columns[0] in ("a", "a_copy")


def test_constant_column_is_degenerate():
    rng = np.random.default_rng(3)
    x = np.column_stack([rng.standard_normal(50), np.full(50, 4.2)])
    with pytest.raises(DegenerateDesignError, match="const"):
        centered_least_squares(rng.standard_normal(50), x, column_names=["noise", "const"])
