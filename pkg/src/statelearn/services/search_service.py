import logging
import math
from collections import Counter
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from ..config import section
from ..exceptions import ConfigError, DataError, StateLearnError
from ..models.frame import TimeSeriesFrame
from ..models.params import SimConfig
from ..models.partition import StatePartition
from ..models.reports import (
    MonteCarloResult,
    ReplicationOutcome,
    SearchConfig,
    SearchResult,
    TallyRow,
    ValidityReport,
)
from .cache_service import CacheService
from .design_service import DesignService
from .scoring_service import ScoringService
from .simulation_service import SimulationService, replication_seeds
from .stats_service import StatsService
from .validity_service import ValidityService

logger = logging.getLogger(__name__)


def tier_size(k: int, s: int) -> int:
    """Candidates with exactly s states among k observables: C(k, s) * 2^s."""
    return math.comb(k, s) * 2 ** s


def _evaluate_candidate(
    design_service: DesignService,
    validity: ValidityService,
    frame: TimeSeriesFrame,
    part: StatePartition,
    cfg: SearchConfig,
) -> ValidityReport:
    try:
        design = design_service.build_lagged_design(frame, part)
    except DataError as e:
        return validity.untestable(part, cfg.strategy, cfg.alpha, str(e))
    return validity.evaluate(
        design,
        part,
        cfg.strategy,
        cfg.alpha,
        guard_tol=cfg.guard_tol,
        include_endo_lagexo=cfg.include_endo_lagexo,
        include_lag2_exo=cfg.include_lag2_exo,
    )


def _rank_key(report: ValidityReport) -> Tuple[int, float, str]:
    return (-report.n_endo, -report.log_likelihood, report.partition.canonical_key())


class SearchService:
    """Tiered exhaustive search over state-space partitions with minimal-state early stopping."""

    def __init__(
        self,
        design_service: Optional[DesignService] = None,
        validity_service: Optional[ValidityService] = None,
        scoring_service: Optional[ScoringService] = None,
        simulation_service: Optional[SimulationService] = None,
        cache_service: Optional[CacheService] = None,
    ):
        self.logger = logging.getLogger(__name__)
        self.design = design_service or DesignService()
        self.scoring = scoring_service or ScoringService(self.design)
        self.validity = validity_service or ValidityService(StatsService(), self.scoring)
        self.simulation = simulation_service or SimulationService()
        if cache_service is None and section("cache").get("enabled", False):
            cache_service = CacheService()
        self.cache = cache_service

    def enumerate_tier(self, k: int, names: Sequence[str], s: int) -> Iterator[StatePartition]:
        """Every partition with exactly ``s`` states, in a fixed order.

        Subsets follow ``itertools.combinations`` over ``names``; within a
        subset, labelings run exo before endo position by position.
        """
        names = tuple(names)
        if len(names) != k:
            raise ConfigError(f"k={k} but {len(names)} names given")
        if not 1 <= s <= k - 2:
            raise ConfigError(f"Tier s={s} outside 1..{k - 2}")
        for subset in combinations(range(k), s):
            chosen = set(subset)
            controls = tuple(names[i] for i in range(k) if i not in chosen)
            for labels in product(("exo", "endo"), repeat=s):
                exo = tuple(names[i] for i, lab in zip(subset, labels) if lab == "exo")
                endo = tuple(names[i] for i, lab in zip(subset, labels) if lab == "endo")
                yield StatePartition.model_construct(
                    exo_states=exo, endo_states=endo, controls=controls
                )

    def _cache_settings(self, cfg: SearchConfig) -> Dict[str, object]:
        stats = self.validity.stats
        return {
            "strategy": cfg.strategy,
            "alpha": cfg.alpha,
            "guard_tol": cfg.guard_tol,
            "include_endo_lagexo": cfg.include_endo_lagexo,
            "include_lag2_exo": cfg.include_lag2_exo,
            "rank_tol": self.design.rank_tol,
            "dof_adjust": stats.dof_adjust,
            "min_denominator": stats.min_denominator,
            "sigma2_floor": self.scoring.sigma2_floor,
        }

    def evaluate_tier(
        self, frame: TimeSeriesFrame, parts: List[StatePartition], cfg: SearchConfig
    ) -> List[ValidityReport]:
        """Evaluate candidates in input order; cached reports are reused when a cache is attached."""
        reports: List[Optional[ValidityReport]] = [None] * len(parts)
        keys: List[Optional[str]] = [None] * len(parts)
        if self.cache is not None:
            digest = frame.digest()
            settings = self._cache_settings(cfg)
            for i, part in enumerate(parts):
                keys[i] = self.cache.evaluation_key(digest, part, settings)
                reports[i] = self.cache.get_report(keys[i])

        todo = [i for i, r in enumerate(reports) if r is None]
        if cfg.parallelism > 1 and len(todo) > 1:
            fresh = Parallel(n_jobs=cfg.parallelism)(
                delayed(_evaluate_candidate)(self.design, self.validity, frame, parts[i], cfg)
                for i in todo
            )
        else:
            fresh = [_evaluate_candidate(self.design, self.validity, frame, parts[i], cfg) for i in todo]

        for i, report in zip(todo, fresh):
            reports[i] = report
            if self.cache is not None:
                self.cache.set_report(keys[i], report)
        return reports

    def run_search(self, frame: TimeSeriesFrame, cfg: Optional[SearchConfig] = None) -> SearchResult:
        """Evaluate tiers s = 1, 2, ... and stop after the first tier holding a valid model.

        Early stopping is decided at tier boundaries only, so results do not
        depend on ``cfg.parallelism``. Score-only mode never stops early and
        ranks every testable candidate by ``cfg.score``.
        """
        cfg = cfg or SearchConfig()
        k = frame.k
        max_states = cfg.resolved_max_states(k)
        score_only = cfg.strategy == "score-only"

        collected: List[ValidityReport] = []
        tested = tiers = untestable = 0
        stopped = False
        for s in range(1, max_states + 1):
            parts = list(self.enumerate_tier(k, frame.names, s))
            self.logger.info("Tier %d: evaluating %d candidates", s, len(parts))
            reports = self.evaluate_tier(frame, parts, cfg)
            tested += len(reports)
            tiers += 1
            bad = sum(1 for r in reports if r.untestable_reason is not None)
            if bad:
                self.logger.warning("Tier %d: %d candidate(s) untestable", s, bad)
            untestable += bad
            valid = [r for r in reports if r.valid]
            self.logger.info("Tier %d: %d valid", s, len(valid))
            collected.extend(valid)
            if valid and cfg.early_stop and not score_only:
                stopped = True
                break

        if score_only:
            ranked_pairs = self.scoring.compare([(r.score, r.partition) for r in collected], cfg.score)
            by_part = {r.partition: r for r in collected}
            ranked = [by_part[p] for _, p in ranked_pairs]
        else:
            ranked = sorted(collected, key=_rank_key)

        if ranked:
            self.logger.info("Winner: %s", ranked[0].partition.encode())
        else:
            self.logger.info("No valid model after %d tier(s)", tiers)
        return SearchResult(
            strategy=cfg.strategy,
            valid_models=tuple(ranked),
            models_tested=tested,
            tiers_completed=tiers,
            stopped_early=stopped,
            untestable=untestable,
        )

    def _replicate(self, index: int, seed: int, sim: SimConfig, n_small: int, cfg: SearchConfig):
        try:
            rep_sim = SimConfig(
                params=sim.params,
                n=n_small,
                seed=seed,
                burn_in=sim.burn_in,
                observation_noise=sim.observation_noise,
            )
            result = self.run_search(self.simulation.simulate(rep_sim), cfg)
        except StateLearnError as e:
            return ReplicationOutcome(index=index, seed=seed, error=str(e)), []
        valid = [r.partition for r in result.valid_models]
        outcome = ReplicationOutcome(
            index=index,
            seed=seed,
            winner=result.winner.partition if result.winner else None,
            n_valid=len(valid),
            min_valid_tier=min((p.n_states for p in valid), default=None),
        )
        return outcome, valid

    def monte_carlo(
        self, cfg: SearchConfig, sim: SimConfig, reps: int, n_small: int
    ) -> MonteCarloResult:
        """Repeat the search on fresh samples and tally how often each partition wins or is valid.

        Replication seeds are spawned from ``sim.seed``. A replication that
        raises is recorded with its error and left out of the tally.
        """
        if reps < 1:
            raise ConfigError(f"reps must be at least 1, got {reps}")
        seeds = replication_seeds(sim.seed, reps)
        inner = cfg.model_copy(update={"parallelism": 1})
        jobs = [(i, seed) for i, seed in enumerate(seeds, start=1)]
        if cfg.parallelism > 1 and reps > 1:
            results = Parallel(n_jobs=cfg.parallelism)(
                delayed(self._replicate)(i, seed, sim, n_small, inner) for i, seed in jobs
            )
        else:
            results = [self._replicate(i, seed, sim, n_small, inner) for i, seed in jobs]

        wins: Counter = Counter()
        valid: Counter = Counter()
        roles: Dict[str, StatePartition] = {}
        outcomes = []
        for outcome, valid_parts in results:
            outcomes.append(outcome)
            if outcome.error is not None:
                self.logger.warning("Replication %d skipped: %s", outcome.index, outcome.error)
                continue
            for part in valid_parts:
                key = part.canonical_key()
                roles.setdefault(key, part)
                valid[key] += 1
            if outcome.winner is not None:
                wins[outcome.winner.canonical_key()] += 1

        order = sorted(valid, key=lambda key: (-wins[key], -valid[key], key))
        rows = tuple(
            TallyRow(
                index=i,
                exogenous_states=tuple(sorted(roles[key].exo_states)),
                endogenous_states=tuple(sorted(roles[key].endo_states)),
                wins=wins[key],
                valid=valid[key],
            )
            for i, key in enumerate(order, start=1)
        )
        self.logger.info(
            "Monte Carlo: %d replications, %d distinct valid partitions", reps, len(rows)
        )
        return MonteCarloResult(reps=reps, rows=rows, replications=tuple(outcomes))
