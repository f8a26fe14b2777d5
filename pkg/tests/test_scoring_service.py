import math

import numpy as np
import pytest
from scipy import stats

from src.statelearn.exceptions import ConfigError
from src.statelearn.models.frame import TimeSeriesFrame
from src.statelearn.models.params import SimConfig, StateSpaceParams
from src.statelearn.models.partition import StatePartition
from src.statelearn.models.reports import ScoreReport
from src.statelearn.services.design_service import DesignService
from src.statelearn.services.scoring_service import ScoringService
from src.statelearn.services.simulation_service import SimulationService

TRUTH = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y1", "y2"))


@pytest.fixture
def scoring_service():
    """Create a ScoringService instance for testing"""
    return ScoringService()


def make_report(loglik, n_params=5, t_eff=100):
    return ScoreReport(
        log_likelihood=loglik,
        bic=-2 * loglik + n_params * math.log(t_eff),
        aic=-2 * loglik + 2 * n_params,
        n_params=n_params,
        t_eff=t_eff,
        equation_names=("a", "b"),
        per_equation_sigma2=(1.0, 1.0),
    )


def ols_residuals(target, regressors):
    x = np.column_stack([np.ones(len(target))] + list(regressors))
    coef, *_ = np.linalg.lstsq(x, target, rcond=None)
    return target - x @ coef


def test_unit_variances(scoring_service):
    """Log terms vanish when every variance is one"""
    assert scoring_service.log_likelihood([1.0, 1.0], 100) == pytest.approx(-283.7877, abs=1e-4)


def test_variances_are_floored():
    """A zero variance is replaced by the floor"""
    service = ScoringService(sigma2_floor=1e-12)
    assert math.isfinite(service.log_likelihood([0.0, 1.0], 50))
    assert service.log_likelihood([0.0, 1.0], 50) == service.log_likelihood([1e-12, 1.0], 50)


def test_report_stores_floored_variances():
    """An exactly fitted equation reports the floor, not zero"""
    rng = np.random.default_rng(8)
    values = np.column_stack([rng.standard_normal(60), rng.standard_normal(60), np.zeros(60)])
    frame = TimeSeriesFrame(names=("a", "b", "c"), values=values)
    service = ScoringService(sigma2_floor=1e-12)
    report = service.score(frame, StatePartition(exo_states=("a",), endo_states=("b",), controls=("c",)))
    assert report.per_equation_sigma2[2] == 1e-12
    assert all(v > 0 for v in report.per_equation_sigma2)
    assert report.log_likelihood == service.log_likelihood(report.per_equation_sigma2, report.t_eff)


def test_count_params():
    """Coefficients of A, B, C, D, diagonal E plus one variance per observable"""
    # y=2, x=1, z=1: A 2 + B 2 + C 1 + D 1 + E 1 + variances 4
    assert ScoringService.count_params(TRUTH) == 11
    assert ScoringService.count_params(StatePartition(exo_states=("a", "b"), controls=("c",))) == 2 + 2 + 3


def test_information_criteria(scoring_service, noisy_frame):
    """BIC and AIC from the likelihood and parameter count"""
    report = scoring_service.score(noisy_frame, TRUTH)
    assert report.t_eff == noisy_frame.n_rows - 2
    assert report.equation_names == TRUTH.names
    assert report.bic == pytest.approx(-2 * report.log_likelihood + 11 * math.log(report.t_eff))
    assert report.aic == pytest.approx(-2 * report.log_likelihood + 22)
    assert all(v > 0 for v in report.per_equation_sigma2)


def test_matches_summed_gaussian_log_densities(scoring_service, small_params):
    """Likelihood equals the sum of normal log-densities of the MLE residuals"""
    frame = SimulationService().simulate(
        SimConfig(params=small_params, n=200, seed=17, burn_in=100, observation_noise=True)
    )
    design = DesignService().build_lagged_design(frame, TRUTH)
    residuals = [ols_residuals(design.z_t[:, 0], [design.z_lag1[:, 0]])]
    targets = np.hstack([design.x_t, design.y_t])
    for j in range(targets.shape[1]):
        residuals.append(ols_residuals(targets[:, j], [design.x_lag1[:, 0], design.z_t[:, 0]]))
    expected = sum(
        stats.norm.logpdf(e, scale=math.sqrt(np.mean(e ** 2))).sum() for e in residuals
    )
    assert scoring_service.score(frame, TRUTH).log_likelihood == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_redundant_exogenous_state_never_lowers_likelihood(scoring_service, small_params, seed):
    """An unrelated AR(1) column fits at least as well as a state than as a control"""
    frame = SimulationService().simulate(
        SimConfig(params=small_params, n=400, seed=seed, burn_in=100, observation_noise=True)
    )
    rng = np.random.default_rng(100 + seed)
    w = np.zeros(frame.n_rows)
    shocks = rng.standard_normal(frame.n_rows)
    for t in range(1, frame.n_rows):
        w[t] = 0.9 * w[t - 1] + shocks[t]
    extended = TimeSeriesFrame(names=frame.names + ("w",), values=np.column_stack([frame.values, w]))

    as_control = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y1", "y2", "w"))
    as_state = StatePartition(exo_states=("z", "w"), endo_states=("x",), controls=("y1", "y2"))
    assert (
        scoring_service.score(extended, as_state).log_likelihood
        >= scoring_service.score(extended, as_control).log_likelihood
    )


def test_smaller_shocks_raise_likelihood(scoring_service, small_params):
    """Halving every shock variance raises the likelihood of the true partition"""
    halved = StateSpaceParams.model_validate(
        {
            **small_params.model_dump(),
            "shock_variances": {n: v / 2 for n, v in small_params.shock_variances.items()},
        }
    )
    simulation = SimulationService()
    base = simulation.simulate(SimConfig(params=small_params, n=1000, seed=5, observation_noise=True))
    small = simulation.simulate(SimConfig(params=halved, n=1000, seed=5, observation_noise=True))
    assert scoring_service.score(small, TRUTH).log_likelihood > scoring_service.score(base, TRUTH).log_likelihood


def test_truth_beats_state_control_swaps(scoring_service, noisy_frame):
    """Swapping a true state for a control lowers the likelihood"""
    truth = scoring_service.score(noisy_frame, TRUTH).log_likelihood
    swaps = [
        StatePartition(exo_states=("z",), endo_states=("y1",), controls=("x", "y2")),
        StatePartition(exo_states=("z",), endo_states=("y2",), controls=("y1", "x")),
        StatePartition(exo_states=("y1",), endo_states=("x",), controls=("z", "y2")),
        StatePartition(exo_states=("y2",), endo_states=("x",), controls=("y1", "z")),
    ]
    for part in swaps:
        assert scoring_service.score(noisy_frame, part).log_likelihood < truth


class TestCompare:
    def test_single_candidate(self, scoring_service):
        only = [(make_report(-10.0), TRUTH)]
        assert scoring_service.compare(only, "loglik") == only

    def test_ties_use_canonical_encoding(self, scoring_service):
        """Equal scores fall back to the canonical partition text"""
        first = StatePartition(exo_states=("a",), controls=("b",))
        second = StatePartition(exo_states=("b",), controls=("a",))
        ranked = scoring_service.compare([(make_report(-5.0), second), (make_report(-5.0), first)], "loglik")
        assert [p for _, p in ranked] == [first, second]

    def test_direction_per_key(self, scoring_service):
        """Higher likelihood, lower BIC and lower AIC all rank first"""
        better = StatePartition(exo_states=("a",), controls=("b",))
        worse = StatePartition(exo_states=("b",), controls=("a",))
        pairs = [(make_report(-50.0), worse), (make_report(-5.0), better)]
        for key in ("loglik", "bic", "aic"):
            assert scoring_service.compare(pairs, key)[0][1] == better

    def test_matches_independent_sort(self, scoring_service, noisy_frame):
        names = noisy_frame.names
        candidates = []
        for exo in names:
            rest = [n for n in names if n != exo]
            part = StatePartition(exo_states=(exo,), endo_states=(rest[0],), controls=tuple(rest[1:]))
            candidates.append((scoring_service.score(noisy_frame, part), part))
        ranked = scoring_service.compare(candidates, "loglik")
        expected = sorted(candidates, key=lambda c: -c[0].log_likelihood)
        np.testing.assert_allclose(
            [r.log_likelihood for r, _ in ranked], [r.log_likelihood for r, _ in expected]
        )

    def test_unknown_key(self, scoring_service):
        with pytest.raises(ConfigError):
            scoring_service.compare([(make_report(-1.0), TRUTH)], "hqic")
