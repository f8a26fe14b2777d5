"""Impulse-response requests and paths, and the VAR(1) baseline fit."""

from typing import Dict, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..config import section
from ..exceptions import ControlShockError, UnknownVariableError
from .params import StateSpaceParams


class IrfRequest(BaseModel):
    model_config = ConfigDict(frozen=True, validate_default=True)

    params: StateSpaceParams
    shocked: str = Field(..., description="State variable receiving the impulse")
    magnitude: float = Field(default_factory=lambda: float(section("irf").get("magnitude", 1.0)))
    horizon: int = Field(default_factory=lambda: int(section("irf").get("horizon", 40)), ge=1)
    scale_by_sd: bool = Field(True, description="Exogenous impulses are magnitude * shock s.d.")
    extra_shocks: Dict[str, float] = Field(
        default_factory=dict, description="Further states shocked in the same impact period"
    )

    @model_validator(mode="after")
    def _check_shocked(self) -> "IrfRequest":
        part = self.params.partition
        for name in (self.shocked, *self.extra_shocks):
            if name in part.controls:
                raise ControlShockError(name)
            if name not in part.exo_states and name not in part.endo_states:
                raise UnknownVariableError([name])
        return self

    def impulses(self) -> Dict[str, float]:
        out = dict(self.extra_shocks)
        out[self.shocked] = out.get(self.shocked, 0.0) + self.magnitude
        return out


class IrfPath(BaseModel):
    """Responses of every observable, one row per period starting at impact."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    names: Tuple[str, ...]
    responses: np.ndarray
    shocked: str = ""

    @field_validator("responses", mode="before")
    @classmethod
    def _coerce(cls, v):
        arr = np.array(v, dtype=float)
        arr.setflags(write=False)
        return arr

    @field_serializer("responses")
    def _dump(self, responses: np.ndarray):
        return responses.tolist()

    @property
    def horizon(self) -> int:
        return int(self.responses.shape[0])

    def response(self, name: str) -> np.ndarray:
        return self.responses[:, self.names.index(name)]

    def to_wide(self) -> pd.DataFrame:
        df = pd.DataFrame(self.responses, columns=list(self.names))
        df.insert(0, "period", np.arange(self.horizon))
        return df

    def to_long(self) -> pd.DataFrame:
        """``period, variable, response`` rows, periods outermost."""
        return self.to_wide().melt(
            id_vars="period", var_name="variable", value_name="response"
        ).sort_values(["period"], kind="stable").reset_index(drop=True)


class Var1Fit(BaseModel):
    """Unrestricted w_t = coef w_{t-1} + u_t on centered data."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    names: Tuple[str, ...]
    coef: np.ndarray
    residual_cov: np.ndarray
    t_eff: int

    @field_validator("coef", "residual_cov", mode="before")
    @classmethod
    def _coerce(cls, v):
        arr = np.array(v, dtype=float)
        arr.setflags(write=False)
        return arr

    @field_serializer("coef", "residual_cov")
    def _dump(self, arr: np.ndarray):
        return arr.tolist()
