import hashlib
import json
import logging
import time
from argparse import Namespace
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from .. import __version__
from ..models.manifest import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

# argparse plumbing that is not part of a run's configuration
_SKIP_KEYS = {"handler", "config", "command"}


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def resolved_options(args: Namespace) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in sorted(vars(args).items()):
        if key in _SKIP_KEYS:
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def write_manifest(
    args: Namespace,
    started: float,
    outputs: Iterable[str | Path],
    path: str | Path,
    inputs: Iterable[str | Path] = (),
    seed: Optional[int] = None,
) -> Path:
    """Record a finished command run as JSON at ``path``.

    Args:
        args: parsed command-line namespace (its resolved options are stored)
        started: ``time.perf_counter()`` value taken when the command began
        outputs: files the command wrote
        path: manifest file to write
        inputs: files read, digested with SHA-256
        seed: master seed, when the command is stochastic
    """
    manifest = RunManifest(
        command=args.command,
        config=resolved_options(args),
        input_digests={str(p): file_digest(p) for p in inputs},
        seed=seed,
        tool_version=__version__,
        duration_seconds=max(0.0, time.perf_counter() - started),
        outputs=[str(p) for p in outputs],
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest.model_dump(mode="json"), f, indent=2)
        f.write("\n")
    logger.info("Wrote run manifest %s", path)
    return path
