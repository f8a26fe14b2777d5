"""Candidate model identity: which observables are exogenous states, endogenous states or controls."""

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

_RESERVED = (",", ";", "=")

ROLE_EXO = "exo"
ROLE_ENDO = "endo"
ROLE_CONTROL = "ctrl"


class StatePartition(BaseModel):
    """Assignment of every observable to exactly one role.

    Block order is meaningful: it fixes the row/column order of the fitted
    matrices. ``canonical_key`` ignores it and is used for tie-breaking.
    """

    model_config = ConfigDict(frozen=True)

    exo_states: Tuple[str, ...] = Field(default=(), description="Exogenous states z_t")
    endo_states: Tuple[str, ...] = Field(default=(), description="Endogenous states x_t")
    controls: Tuple[str, ...] = Field(default=(), description="Controls y_t")

    @model_validator(mode="after")
    def _check_blocks(self) -> "StatePartition":
        names = self.names
        for name in names:
            if not name or any(ch in name for ch in _RESERVED):
                raise ValueError(f"Invalid variable name {name!r}")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"Blocks overlap or repeat names: {', '.join(dupes)}")
        if not self.exo_states and not self.endo_states:
            raise ValueError("A partition needs at least one state variable")
        return self

    @property
    def names(self) -> Tuple[str, ...]:
        return self.exo_states + self.endo_states + self.controls

    @property
    def time_t_endogenous(self) -> Tuple[str, ...]:
        """Variables determined at t by the states: endogenous states then controls."""
        return self.endo_states + self.controls

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def n_states(self) -> int:
        return len(self.exo_states) + len(self.endo_states)

    @property
    def n_endo(self) -> int:
        return len(self.endo_states)

    @property
    def n_exo(self) -> int:
        return len(self.exo_states)

    def roles(self) -> Dict[str, str]:
        out = {name: ROLE_EXO for name in self.exo_states}
        out.update({name: ROLE_ENDO for name in self.endo_states})
        out.update({name: ROLE_CONTROL for name in self.controls})
        return out

    def encode(self) -> str:
        """Compact text form, e.g. ``exo=g,z;endo=k;ctrl=c,y``."""
        return ";".join(
            f"{role}={','.join(block)}"
            for role, block in (
                (ROLE_EXO, self.exo_states),
                (ROLE_ENDO, self.endo_states),
                (ROLE_CONTROL, self.controls),
            )
        )

    @classmethod
    def parse(cls, text: str) -> "StatePartition":
        """Inverse of :meth:`encode`. Missing blocks are empty."""
        blocks: Dict[str, Tuple[str, ...]] = {ROLE_EXO: (), ROLE_ENDO: (), ROLE_CONTROL: ()}
        for chunk in filter(None, (part.strip() for part in text.split(";"))):
            role, sep, body = chunk.partition("=")
            role = role.strip()
            if not sep or role not in blocks:
                raise ValueError(f"Cannot parse partition block {chunk!r}")
            blocks[role] = tuple(n.strip() for n in body.split(",") if n.strip())
        return cls(
            exo_states=blocks[ROLE_EXO],
            endo_states=blocks[ROLE_ENDO],
            controls=blocks[ROLE_CONTROL],
        )

    def canonical_key(self) -> str:
        """Order-insensitive encoding; the final tie-break key for rankings."""
        return StatePartition.model_construct(
            exo_states=tuple(sorted(self.exo_states)),
            endo_states=tuple(sorted(self.endo_states)),
            controls=tuple(sorted(self.controls)),
        ).encode()

    def same_roles(self, other: "StatePartition") -> bool:
        return self.roles() == other.roles()
