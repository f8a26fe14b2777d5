"""Observed data and the lagged design derived from it."""

import hashlib
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..exceptions import DataError, InsufficientRowsError, UnknownVariableError
from .partition import StatePartition

# Two lags are consumed by the design; two more rows keep every regression estimable.
MIN_ROWS = 4


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


class TimeSeriesFrame(BaseModel):
    """T x k matrix of observations with unique column names.

    Rows are time-ordered. Construction rejects non-finite entries and frames
    too short to build a lagged design.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    names: Tuple[str, ...] = Field(..., description="Column names, unique")
    values: np.ndarray = Field(..., description="Observations, shape (T, k)")

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {arr.shape}")
        return _readonly(arr)

    @model_validator(mode="after")
    def _check_frame(self) -> "TimeSeriesFrame":
        if len(set(self.names)) != len(self.names):
            raise DataError("Duplicate column names in frame")
        if self.values.shape[1] != len(self.names):
            raise DataError(
                f"{len(self.names)} names for {self.values.shape[1]} columns"
            )
        if self.values.shape[0] < MIN_ROWS:
            raise InsufficientRowsError(self.values.shape[0], MIN_ROWS)
        if not np.isfinite(self.values).all():
            raise DataError("Frame contains missing or non-finite values")
        return self

    @field_serializer("values")
    def _dump_values(self, values: np.ndarray):
        return values.tolist()

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def k(self) -> int:
        return len(self.names)

    def indices(self, names: Sequence[str]) -> List[int]:
        lookup = {name: i for i, name in enumerate(self.names)}
        missing = [n for n in names if n not in lookup]
        if missing:
            raise UnknownVariableError(missing)
        return [lookup[n] for n in names]

    def columns(self, names: Sequence[str]) -> np.ndarray:
        return self.values[:, self.indices(names)]

    def column(self, name: str) -> np.ndarray:
        return self.columns([name])[:, 0]

    def digest(self) -> str:
        """SHA-256 over the column names and the raw float64 bytes."""
        h = hashlib.sha256()
        h.update("\x1f".join(self.names).encode("utf-8"))
        h.update(np.ascontiguousarray(self.values, dtype="<f8").tobytes())
        return h.hexdigest()


class VarRef(BaseModel):
    """One column of a lagged design: a variable at a given lag."""

    model_config = ConfigDict(frozen=True)

    name: str
    lag: int = Field(0, ge=0, le=2)

    @property
    def label(self) -> str:
        return f"{self.name}[t]" if self.lag == 0 else f"{self.name}[t-{self.lag}]"


_BLOCKS = ("y_t", "x_t", "z_t", "y_lag1", "x_lag1", "z_lag1", "x_lag2", "z_lag2")


class LaggedDesign(BaseModel):
    """Aligned current and lagged blocks for one candidate partition.

    Row i of every block corresponds to frame row ``i + 2``; a lag-l block
    holds frame row ``i + 2 - l``. Blocks are not centered here: the
    regressions center what they use.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: StatePartition
    y_t: np.ndarray
    x_t: np.ndarray
    z_t: np.ndarray
    y_lag1: np.ndarray
    x_lag1: np.ndarray
    z_lag1: np.ndarray
    x_lag2: np.ndarray
    z_lag2: np.ndarray

    @field_validator(*_BLOCKS, mode="before")
    @classmethod
    def _coerce_block(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"design blocks must be 2-D, got shape {arr.shape}")
        return _readonly(arr)

    @model_validator(mode="after")
    def _check_alignment(self) -> "LaggedDesign":
        rows = {getattr(self, b).shape[0] for b in _BLOCKS}
        if len(rows) != 1:
            raise ValueError(f"design blocks have mismatched row counts {sorted(rows)}")
        p = self.partition
        widths = {
            "y_t": len(p.controls), "y_lag1": len(p.controls),
            "x_t": p.n_endo, "x_lag1": p.n_endo, "x_lag2": p.n_endo,
            "z_t": p.n_exo, "z_lag1": p.n_exo, "z_lag2": p.n_exo,
        }
        for block, width in widths.items():
            if getattr(self, block).shape[1] != width:
                raise ValueError(f"block {block} should have {width} columns")
        return self

    @property
    def t_eff(self) -> int:
        return int(self.y_t.shape[0])

    def _block_for(self, name: str, lag: int) -> Tuple[np.ndarray, int]:
        p = self.partition
        if name in p.controls:
            blocks: Dict[int, str] = {0: "y_t", 1: "y_lag1"}
            pos = p.controls.index(name)
        elif name in p.endo_states:
            blocks = {0: "x_t", 1: "x_lag1", 2: "x_lag2"}
            pos = p.endo_states.index(name)
        elif name in p.exo_states:
            blocks = {0: "z_t", 1: "z_lag1", 2: "z_lag2"}
            pos = p.exo_states.index(name)
        else:
            raise UnknownVariableError([name])
        if lag not in blocks:
            raise DataError(f"Design does not carry {name} at lag {lag}")
        return getattr(self, blocks[lag]), pos

    def column(self, ref: VarRef) -> np.ndarray:
        block, pos = self._block_for(ref.name, ref.lag)
        return block[:, pos]

    def matrix(self, refs: Sequence[VarRef]) -> np.ndarray:
        if not refs:
            return np.empty((self.t_eff, 0))
        return np.column_stack([self.column(r) for r in refs])
