"""Result records produced by testing, scoring, searching and calibrating."""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from ..config import default_jobs, section
from ..exceptions import ConfigError, InsufficientColumnsError
from .frame import VarRef
from .partition import StatePartition

Strategy = Literal["multiple", "srivastava", "score-only"]
ScoreKey = Literal["loglik", "bic", "aic"]
ObligationKind = Literal["endo-pair", "lagstate-exo", "endo-lagexo", "exo-pair"]


class PartialCorrTest(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    var_a: str
    var_b: str
    conditioning: Tuple[str, ...] = ()
    r: Optional[float] = Field(None, description="Partial correlation; None when the guard fired")
    t_stat: Optional[float] = None
    df: int
    p_value: float = Field(..., ge=0.0, le=1.0)
    guard_triggered: bool = False


class SrivastavaStat(BaseModel):
    """Diagonal-covariance test result. ``degenerate`` marks a statistic that could not be formed."""

    model_config = ConfigDict(frozen=True)

    t3: float
    gamma3: float
    a20: float
    a40: float
    p: int = Field(..., description="Vector dimension")
    n_eff: int
    p_value: float = Field(..., ge=0.0, le=1.0)
    alpha: float
    denominator_substituted: bool = False
    degenerate: bool = False

    @property
    def rejected(self) -> bool:
        return not self.p_value > self.alpha


class CiObligation(BaseModel):
    """One conditional independence a candidate partition implies."""

    model_config = ConfigDict(frozen=True)

    kind: ObligationKind
    var_a: VarRef
    var_b: VarRef
    conditioning: Tuple[VarRef, ...]

    @property
    def label(self) -> str:
        cond = ",".join(r.label for r in self.conditioning)
        return f"{self.var_a.label} _||_ {self.var_b.label} | {cond}"


class CheckRecord(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    kind: str = Field(..., description="Obligation kind, or 'srivastava'")
    label: str
    p_value: float = Field(..., ge=0.0, le=1.0)
    statistic: Optional[float] = None
    guard_triggered: bool = False


class ScoreReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_likelihood: float
    bic: float
    aic: float
    n_params: int
    t_eff: int
    equation_names: Tuple[str, ...]
    per_equation_sigma2: Tuple[PositiveFloat, ...] = Field(..., description="Floored MLE variance per equation")

    def value(self, key: ScoreKey) -> float:
        return {"loglik": self.log_likelihood, "bic": self.bic, "aic": self.aic}[key]


class ValidityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    partition: StatePartition
    strategy: Strategy
    tests: Tuple[CheckRecord, ...] = ()
    sig_level_used: float
    valid: bool
    log_likelihood: Optional[float] = None
    score: Optional[ScoreReport] = None
    untestable_reason: Optional[str] = None

    @property
    def n_endo(self) -> int:
        return self.partition.n_endo

    @property
    def min_p_value(self) -> Optional[float]:
        return min((t.p_value for t in self.tests), default=None)

    def to_row(self) -> Dict[str, object]:
        """Flat summary: partition, strategy, valid, p_min, log_likelihood."""
        return {
            "partition": self.partition.encode(),
            "strategy": self.strategy,
            "valid": self.valid,
            "p_min": self.min_p_value,
            "log_likelihood": self.log_likelihood,
        }


class SearchConfig(BaseModel):
    """Search settings; defaults come from the ``search``/``stats``/``validity`` config sections."""

    model_config = ConfigDict(frozen=True, validate_default=True)

    alpha: float = Field(default_factory=lambda: float(section("search").get("alpha", 0.05)), gt=0.0, le=1.0)
    strategy: Strategy = Field(default_factory=lambda: section("search").get("strategy", "multiple"))
    score: ScoreKey = Field(default_factory=lambda: section("search").get("score", "loglik"))
    max_states: Optional[int] = Field(default_factory=lambda: section("search").get("max_states"), ge=1)
    guard_tol: float = Field(default_factory=lambda: float(section("stats").get("guard_tol", 1e-10)), gt=0.0)
    parallelism: int = Field(default_factory=default_jobs, ge=1)
    early_stop: bool = Field(default_factory=lambda: bool(section("search").get("early_stop", True)))
    include_endo_lagexo: bool = Field(
        default_factory=lambda: bool(section("validity").get("include_endo_lagexo", True))
    )
    include_lag2_exo: bool = False

    def resolved_max_states(self, k: int) -> int:
        ceiling = k - 2
        if ceiling < 1:
            raise InsufficientColumnsError(k, 3)
        if self.max_states is None:
            return ceiling
        if self.max_states > ceiling:
            raise ConfigError(f"max_states={self.max_states} exceeds k-2={ceiling}")
        return self.max_states


class SearchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: Strategy
    valid_models: Tuple[ValidityReport, ...]
    models_tested: int
    tiers_completed: int
    stopped_early: bool
    untestable: int = 0

    @property
    def winner(self) -> Optional[ValidityReport]:
        return self.valid_models[0] if self.valid_models else None

    def rank_of(self, partition: StatePartition) -> Optional[int]:
        """1-based position of a partition among the valid models, matching by role."""
        for i, report in enumerate(self.valid_models, start=1):
            if report.partition.same_roles(partition):
                return i
        return None


class ReplicationOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    seed: int
    winner: Optional[StatePartition] = None
    n_valid: int = 0
    min_valid_tier: Optional[int] = None
    error: Optional[str] = None

    @property
    def winner_tier(self) -> Optional[int]:
        return self.winner.n_states if self.winner else None


class TallyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    exogenous_states: Tuple[str, ...]
    endogenous_states: Tuple[str, ...]
    wins: int = Field(..., ge=0)
    valid: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _wins_bounded(self) -> "TallyRow":
        if self.wins > self.valid:
            raise ValueError("a model cannot win more often than it is valid")
        return self


class MonteCarloResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    reps: int
    rows: Tuple[TallyRow, ...]
    replications: Tuple[ReplicationOutcome, ...]

    @property
    def no_winner(self) -> int:
        return sum(1 for r in self.replications if r.error is None and r.winner is None)

    @property
    def skipped(self) -> int:
        return sum(1 for r in self.replications if r.error is not None)

    def tier_histogram(self) -> Dict[int, int]:
        """How often the winner sat in each tier; shows where early stopping settles."""
        hist: Dict[int, int] = {}
        for rep in self.replications:
            if rep.winner_tier is not None:
                hist[rep.winner_tier] = hist.get(rep.winner_tier, 0) + 1
        return dict(sorted(hist.items()))


class CalibrationGrid(BaseModel):
    model_config = ConfigDict(frozen=True, validate_default=True)

    alpha: List[float] = Field(default_factory=lambda: list(section("calibration").get("alpha", [0.05])))
    n: List[int] = Field(default_factory=lambda: list(section("calibration").get("n", [500])))
    m: List[int] = Field(default_factory=lambda: list(section("calibration").get("m", [5])))
    correlation: List[float] = Field(
        default_factory=lambda: list(section("calibration").get("correlation", [0.0, 0.5]))
    )
    repetitions: int = Field(
        default_factory=lambda: int(section("calibration").get("repetitions", 1000)), ge=1
    )
    seed: int = Field(default_factory=lambda: int(section("calibration").get("seed", 0)), ge=0)

    @model_validator(mode="after")
    def _check_grid(self) -> "CalibrationGrid":
        for name in ("alpha", "n", "m", "correlation"):
            if not getattr(self, name):
                raise ValueError(f"calibration grid axis '{name}' is empty")
        if any(not 0.0 < a < 1.0 for a in self.alpha):
            raise ValueError("alpha values must lie in (0, 1)")
        if any(m < 2 for m in self.m):
            raise ValueError("m must be at least 2")
        for m in self.m:
            for n in self.n:
                if n < m + 2:
                    raise ValueError(f"n={n} too small for m={m}")
            for rho in self.correlation:
                if not -1.0 / (m - 1) < rho < 1.0:
                    raise ValueError(f"correlation {rho} is not positive definite for m={m}")
        return self


class CalibrationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["size", "power"]
    empirical_rate: float = Field(..., ge=0.0, le=1.0)
    alpha: float
    difference: float = Field(..., description="empirical_rate - alpha")
    n: int
    correlation: float
    m: int
    repetitions: int
