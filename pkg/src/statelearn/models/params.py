"""Fitted or configured coefficients of the first-order state-space model.

    z_t = E z_{t-1} + eps_t          (E diagonal)
    x_t = C x_{t-1} + D z_t
    y_t = A x_{t-1} + B z_t
"""

from typing import Any, Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_serializer, model_validator

from ..config import section
from ..exceptions import NonStationaryError
from .partition import StatePartition

# matrix -> (row block, column block)
MATRIX_BLOCKS: Dict[str, Tuple[str, str]] = {
    "A": ("controls", "endo_states"),
    "B": ("controls", "exo_states"),
    "C": ("endo_states", "endo_states"),
    "D": ("endo_states", "exo_states"),
    "E": ("exo_states", "exo_states"),
}


def spectral_radius(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


class StateSpaceParams(BaseModel):
    """Coefficient matrices plus one shock variance per observable.

    Matrices may be given as plain nested lists or in the serialized
    ``{"rows", "cols", "values"}`` form; omitted matrices default to zeros.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: StatePartition
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    shock_variances: Dict[str, float] = Field(
        ..., description="Innovation variance per observable (exogenous shocks and, optionally, observation noise)"
    )

    @model_validator(mode="before")
    @classmethod
    def _unpack_matrices(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        part = data.get("partition")
        if not isinstance(part, StatePartition):
            part = StatePartition.model_validate(part)
        data["partition"] = part
        for key, (row_block, col_block) in MATRIX_BLOCKS.items():
            rows = getattr(part, row_block)
            cols = getattr(part, col_block)
            raw = data.get(key)
            if isinstance(raw, dict):
                if tuple(raw.get("rows", rows)) != rows or tuple(raw.get("cols", cols)) != cols:
                    raise ValueError(f"Matrix {key} labels do not match the partition")
                raw = raw.get("values")
            if raw is None:
                arr = np.zeros((len(rows), len(cols)))
            else:
                arr = np.array(raw, dtype=float)
                if arr.size == 0:
                    arr = np.zeros((len(rows), len(cols)))
            if arr.shape != (len(rows), len(cols)):
                raise ValueError(
                    f"Matrix {key} has shape {arr.shape}, expected {(len(rows), len(cols))}"
                )
            if not np.isfinite(arr).all():
                raise ValueError(f"Matrix {key} contains non-finite entries")
            arr.setflags(write=False)
            data[key] = arr
        return data

    @model_validator(mode="after")
    def _check_params(self) -> "StateSpaceParams":
        names = set(self.partition.names)
        if set(self.shock_variances) != names:
            missing = sorted(names - set(self.shock_variances))
            extra = sorted(set(self.shock_variances) - names)
            raise ValueError(f"shock_variances mismatch (missing={missing}, extra={extra})")
        for name, var in self.shock_variances.items():
            if not np.isfinite(var) or var <= 0:
                raise ValueError(f"shock variance for {name} must be positive, got {var}")
        e = self.E
        if np.any(e - np.diag(np.diag(e))):
            raise ValueError("E must be diagonal")
        bad = [n for n, v in zip(self.partition.exo_states, np.diag(e)) if abs(v) >= 1.0]
        if bad:
            raise NonStationaryError(
                "Exogenous persistence must satisfy |e_ii| < 1; violated for " + ", ".join(bad)
            )
        return self

    @model_serializer(mode="plain")
    def _serialize(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"partition": self.partition.model_dump(mode="json")}
        for key, (row_block, col_block) in MATRIX_BLOCKS.items():
            out[key] = {
                "rows": list(getattr(self.partition, row_block)),
                "cols": list(getattr(self.partition, col_block)),
                "values": getattr(self, key).tolist(),
            }
        out["shock_variances"] = {n: float(self.shock_variances[n]) for n in self.partition.names}
        return out

    @property
    def e_diag(self) -> np.ndarray:
        return np.diag(self.E).copy()

    def shock_sd(self, names) -> np.ndarray:
        return np.sqrt(np.array([self.shock_variances[n] for n in names], dtype=float))


class SimConfig(BaseModel):
    """Everything the simulator needs to reproduce one sample bit for bit."""

    model_config = ConfigDict(frozen=True)

    params: StateSpaceParams
    n: int = Field(..., ge=4, description="Rows kept after burn-in")
    seed: int = Field(..., ge=0, lt=2**64)
    burn_in: int = Field(
        default_factory=lambda: int(section("simulation").get("burn_in", 1000)), ge=0
    )
    observation_noise: bool = Field(
        False, description="Add i.i.d. noise with the configured variances to x and y"
    )

    @model_validator(mode="after")
    def _check_stable(self) -> "SimConfig":
        rho = spectral_radius(self.params.C)
        if rho >= 1.0:
            raise NonStationaryError(f"Spectral radius of C is {rho:.4f}; simulation requires < 1")
        return self

    @property
    def partition(self) -> StatePartition:
        return self.params.partition
