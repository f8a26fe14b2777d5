import math

import numpy as np
import pytest

from src.statelearn.exceptions import ConfigError, InsufficientColumnsError
from src.statelearn.models.frame import TimeSeriesFrame
from src.statelearn.models.params import SimConfig
from src.statelearn.models.partition import StatePartition
from src.statelearn.models.reports import SearchConfig
from src.statelearn.providers import preset_provider
from src.statelearn.services.search_service import SearchService, tier_size
from src.statelearn.services.simulation_service import SimulationService, replication_seeds

TRUTH = StatePartition(exo_states=("z",), endo_states=("x",), controls=("y1", "y2"))


@pytest.fixture
def search_service():
    """Create a SearchService instance for testing"""
    return SearchService()


def search_config(**overrides):
    settings = {"alpha": 0.05, "strategy": "multiple", "parallelism": 1, "early_stop": True}
    settings.update(overrides)
    return SearchConfig(**settings)


class TestEnumeration:
    def test_three_observables_one_state(self, search_service):
        """C(3,1) * 2 candidates"""
        assert len(list(search_service.enumerate_tier(3, "abc", 1))) == 6

    def test_nine_observables_three_tiers(self, search_service):
        """834 candidates up to three states"""
        names = [f"v{i}" for i in range(9)]
        total = sum(len(list(search_service.enumerate_tier(9, names, s))) for s in range(1, 4))
        assert total == 834

    def test_eleven_observables_seven_tiers(self):
        assert sum(tier_size(11, s) for s in range(1, 8)) == 93_434

    def test_tier_contents(self, search_service):
        """Every tier is complete, duplicate-free and has the right state count"""
        for k in range(3, 8):
            names = [f"v{i}" for i in range(k)]
            for s in range(1, k - 1):
                parts = list(search_service.enumerate_tier(k, names, s))
                assert len(parts) == tier_size(k, s) == math.comb(k, s) * 2 ** s
                assert len({p.canonical_key() for p in parts}) == len(parts)
                assert all(p.n_states == s and p.k == k for p in parts)

    def test_order_is_fixed(self, search_service):
        """State sets in column order, all-exogenous first"""
        first = [p.encode() for p in search_service.enumerate_tier(4, "abcd", 2)]
        assert first == [p.encode() for p in search_service.enumerate_tier(4, "abcd", 2)]
        assert first[0] == "exo=a,b;endo=;ctrl=c,d"
        assert first[1] == "exo=a;endo=b;ctrl=c,d"

    def test_tier_out_of_range(self, search_service):
        with pytest.raises(ConfigError):
            list(search_service.enumerate_tier(4, "abcd", 3))


class TestRunSearch:
    def test_recovers_truth_and_stops_early(self, search_service, small_frame):
        """Noise-free data: the true partition wins in tier 2"""
        result = search_service.run_search(small_frame, search_config())
        assert result.winner.partition.same_roles(TRUTH)
        assert result.rank_of(TRUTH) == 1
        assert result.stopped_early
        assert result.tiers_completed == 2
        assert result.models_tested == tier_size(4, 1) + tier_size(4, 2)
        assert all(r.partition.n_states == 2 for r in result.valid_models)

    def test_parallel_matches_serial(self, search_service, noisy_frame):
        """Worker count does not change the ranking"""
        serial = search_service.run_search(noisy_frame, search_config(alpha=0.01))
        parallel = search_service.run_search(noisy_frame, search_config(alpha=0.01, parallelism=2))
        assert [r.partition for r in serial.valid_models] == [r.partition for r in parallel.valid_models]
        assert [r.log_likelihood for r in serial.valid_models] == [
            r.log_likelihood for r in parallel.valid_models
        ]
        assert serial.models_tested == parallel.models_tested

    def test_unit_alpha_rejects_everything(self, search_service, noisy_frame):
        result = search_service.run_search(noisy_frame, search_config(strategy="srivastava", alpha=1.0))
        assert result.valid_models == ()
        assert result.winner is None
        assert not result.stopped_early
        assert result.tiers_completed == 2

    def test_score_only_ranks_every_candidate(self, search_service, noisy_frame):
        """Score-only mode keeps all 32 candidates, best likelihood first"""
        result = search_service.run_search(noisy_frame, search_config(strategy="score-only"))
        assert len(result.valid_models) == result.models_tested == 32
        assert not result.stopped_early
        logliks = [r.log_likelihood for r in result.valid_models]
        assert logliks == sorted(logliks, reverse=True)

    def test_score_only_by_bic(self, search_service, noisy_frame):
        result = search_service.run_search(noisy_frame, search_config(strategy="score-only", score="bic"))
        bics = [r.score.bic for r in result.valid_models]
        assert bics == sorted(bics)

    def test_without_early_stop_all_tiers_run(self, search_service, noisy_frame):
        """An extra white-noise column adds a third tier that only runs without early stopping"""
        extra = np.random.default_rng(30).standard_normal((noisy_frame.n_rows, 1))
        frame = TimeSeriesFrame(names=noisy_frame.names + ("w",), values=np.hstack([noisy_frame.values, extra]))
        stopped = search_service.run_search(frame, search_config(alpha=0.01))
        full = search_service.run_search(frame, search_config(alpha=0.01, early_stop=False))
        assert stopped.tiers_completed == 2
        assert full.tiers_completed == 3
        assert not full.stopped_early
        assert full.models_tested == sum(tier_size(5, s) for s in range(1, 4))
        assert len(full.valid_models) >= len(stopped.valid_models)

    def test_more_endogenous_states_rank_first(self, search_service, noisy_frame):
        valid = search_service.run_search(noisy_frame, search_config(alpha=0.01, early_stop=False))
        counts = [r.n_endo for r in valid.valid_models]
        assert counts == sorted(counts, reverse=True)

    def test_max_states_bound(self, search_service, small_frame):
        """max_states caps the tiers and may not exceed k-2"""
        with pytest.raises(ConfigError):
            search_service.run_search(small_frame, search_config(max_states=3))
        result = search_service.run_search(small_frame, search_config(max_states=1))
        assert result.tiers_completed == 1
        assert result.winner is None

    def test_two_observables_cannot_be_searched(self, search_service):
        """Too few columns is a data problem, not a configuration one"""
        frame = TimeSeriesFrame(names=("a", "b"), values=np.random.default_rng(3).standard_normal((50, 2)))
        with pytest.raises(InsufficientColumnsError) as err:
            search_service.run_search(frame, search_config())
        assert err.value.columns == 2
        assert err.value.required == 3

    @pytest.mark.slow
    @pytest.mark.parametrize("strategy", ["multiple", "srivastava"])
    def test_large_sample_preset_recovery(self, search_service, strategy):
        """100,000 rows of small-rbc-like: the truth is the only valid model"""
        sim = preset_provider.preset("small-rbc-like", n=100_000, seed=1)
        frame = SimulationService().simulate(sim)
        result = search_service.run_search(frame, search_config(strategy=strategy, alpha=0.01))
        assert [r.partition.encode() for r in result.valid_models] == ["exo=g,z;endo=k;ctrl=w,r,y,c,l,i"]
        assert result.stopped_early
        assert result.tiers_completed == 3


class TestMonteCarlo:
    def test_single_replication_matches_direct_search(self, search_service, small_params):
        """One replication is a plain search on the spawned seed"""
        sim = SimConfig(params=small_params, n=300, seed=21, burn_in=200, observation_noise=True)
        cfg = search_config(alpha=0.01)
        mc = search_service.monte_carlo(cfg, sim, reps=1, n_small=300)
        rep_frame = SimulationService().simulate(
            SimConfig(
                params=small_params,
                n=300,
                seed=replication_seeds(21, 1)[0],
                burn_in=200,
                observation_noise=True,
            )
        )
        direct = search_service.run_search(rep_frame, cfg)
        outcome = mc.replications[0]
        assert outcome.seed == replication_seeds(21, 1)[0]
        assert outcome.n_valid == len(direct.valid_models)
        if direct.winner is None:
            assert outcome.winner is None
        else:
            assert outcome.winner.same_roles(direct.winner.partition)

    def test_tally_accounting(self, search_service, small_params):
        """Wins add up to the replications that found a winner"""
        sim = SimConfig(params=small_params, n=200, seed=5, burn_in=100, observation_noise=True)
        mc = search_service.monte_carlo(search_config(), sim, reps=6, n_small=200)
        assert mc.reps == len(mc.replications) == 6
        assert sum(row.wins for row in mc.rows) == mc.reps - mc.no_winner - mc.skipped
        assert all(row.wins <= row.valid <= mc.reps for row in mc.rows)
        assert [row.index for row in mc.rows] == list(range(1, len(mc.rows) + 1))
        assert sum(mc.tier_histogram().values()) == mc.reps - mc.no_winner - mc.skipped

    def test_parallel_replications_match_serial(self, search_service, small_params):
        sim = SimConfig(params=small_params, n=150, seed=8, burn_in=100, observation_noise=True)
        serial = search_service.monte_carlo(search_config(), sim, reps=3, n_small=150)
        parallel = search_service.monte_carlo(search_config(parallelism=2), sim, reps=3, n_small=150)
        assert serial.rows == parallel.rows

    def test_reps_must_be_positive(self, search_service, small_params):
        sim = SimConfig(params=small_params, n=100, seed=0)
        with pytest.raises(ConfigError):
            search_service.monte_carlo(search_config(), sim, reps=0, n_small=100)

    @pytest.mark.slow
    def test_small_sample_preset_win_rate(self, search_service):
        """200 replications of 100 rows: the truth usually wins and few partitions are ever valid"""
        sim = preset_provider.preset("small-rbc-like", n=100, seed=2024)
        mc = search_service.monte_carlo(search_config(parallelism=2), sim, reps=200, n_small=100)
        truth = [
            row for row in mc.rows
            if row.exogenous_states == ("g", "z") and row.endogenous_states == ("k",)
        ]
        assert len(truth) == 1
        assert truth[0].wins / mc.reps >= 0.70
        candidates = sum(tier_size(9, s) for s in range(1, 4))
        assert len(mc.rows) <= 0.05 * candidates
