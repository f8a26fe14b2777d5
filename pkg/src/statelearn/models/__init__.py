from .frame import MIN_ROWS, LaggedDesign, TimeSeriesFrame, VarRef
from .irf import IrfPath, IrfRequest, Var1Fit
from .manifest import RunManifest
from .params import SimConfig, StateSpaceParams
from .partition import StatePartition
from .reports import (
    CalibrationGrid,
    CalibrationRow,
    CheckRecord,
    CiObligation,
    MonteCarloResult,
    PartialCorrTest,
    ReplicationOutcome,
    ScoreKey,
    ScoreReport,
    SearchConfig,
    SearchResult,
    SrivastavaStat,
    Strategy,
    TallyRow,
    ValidityReport,
)

__all__ = [
    "MIN_ROWS",
    "CalibrationGrid",
    "CalibrationRow",
    "CheckRecord",
    "CiObligation",
    "IrfPath",
    "IrfRequest",
    "LaggedDesign",
    "MonteCarloResult",
    "PartialCorrTest",
    "ReplicationOutcome",
    "RunManifest",
    "ScoreKey",
    "ScoreReport",
    "SearchConfig",
    "SearchResult",
    "SimConfig",
    "SrivastavaStat",
    "StatePartition",
    "StateSpaceParams",
    "Strategy",
    "TallyRow",
    "TimeSeriesFrame",
    "Var1Fit",
    "ValidityReport",
    "VarRef",
]
