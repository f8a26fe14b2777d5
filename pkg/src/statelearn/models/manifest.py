from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """What a command ran with, written next to its outputs.

    ``config`` holds every resolved option, so passing the manifest back
    through ``--config`` reproduces the run.
    """

    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    input_digests: Dict[str, str] = Field(default_factory=dict, description="path -> SHA-256")
    seed: Optional[int] = None
    tool_version: str
    duration_seconds: float = Field(..., ge=0.0)
    outputs: List[str] = Field(default_factory=list)
