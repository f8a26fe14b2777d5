import numpy as np
import pytest
from pydantic import ValidationError

from src.statelearn.models.reports import CalibrationGrid
from src.statelearn.services.calibration_service import CalibrationService, equicorrelation


@pytest.fixture
def calibration_service():
    """Create a CalibrationService instance for testing"""
    return CalibrationService()


def test_equicorrelation():
    """Unit diagonal, constant off-diagonal"""
    np.testing.assert_allclose(equicorrelation(3, 0.5), [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]])


def test_rows_follow_grid(calibration_service):
    """One row per grid cell, labelled size or power"""
    grid = CalibrationGrid(alpha=[0.05, 0.1], n=[100], m=[3], correlation=[0.0, 0.6], repetitions=20, seed=4)
    rows = calibration_service.run(grid)
    assert [(r.alpha, r.correlation) for r in rows] == [(0.05, 0.0), (0.05, 0.6), (0.1, 0.0), (0.1, 0.6)]
    assert [r.kind for r in rows] == ["size", "power", "size", "power"]
    for row in rows:
        assert row.difference == pytest.approx(row.empirical_rate - row.alpha)
        assert row.repetitions == 20


def test_reproducible(calibration_service):
    """Same grid seed, same rates"""
    grid = CalibrationGrid(alpha=[0.05], n=[60], m=[4], correlation=[0.3], repetitions=30, seed=9)
    assert calibration_service.run(grid) == calibration_service.run(grid)


def test_strong_correlation_is_detected(calibration_service):
    grid = CalibrationGrid(alpha=[0.05], n=[300], m=[5], correlation=[0.5], repetitions=50, seed=1)
    assert calibration_service.run(grid)[0].empirical_rate > 0.9


def test_zero_repetitions_rejected():
    with pytest.raises(ValidationError):
        CalibrationGrid(repetitions=0)


def test_invalid_correlation_rejected():
    """The equicorrelation matrix must be positive definite"""
    with pytest.raises(ValidationError, match="positive definite"):
        CalibrationGrid(m=[3], correlation=[-0.6])


def test_sample_too_small_for_dimension():
    with pytest.raises(ValidationError):
        CalibrationGrid(n=[5], m=[5])


@pytest.mark.slow
def test_size_and_power(calibration_service):
    """Empirical size near alpha, power near one"""
    rows = calibration_service.run(
        CalibrationGrid(alpha=[0.05], n=[500], m=[5], correlation=[0.0, 0.5], repetitions=1000, seed=0)
    )
    size, power = rows
    assert abs(size.empirical_rate - 0.05) <= 0.015
    assert power.empirical_rate > 0.95
