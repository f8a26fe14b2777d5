import logging
import time
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from ..models.reports import CalibrationGrid
from ..providers import csv_provider
from ..services.calibration_service import CalibrationService
from ..utils.run_manifest import write_manifest
from .common import manifest_path, require

logger = logging.getLogger(__name__)

CALIBRATION_COLUMNS = [
    "kind", "empirical_rate", "alpha", "difference", "n", "correlation", "m", "repetitions",
]

calibration_service = CalibrationService()


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "calibrate", help="Empirical size and power of the diagonal-covariance test"
    )
    parser.add_argument("--alpha", type=float, nargs="+", help="Significance levels")
    parser.add_argument("--n", type=int, nargs="+", help="Sample sizes")
    parser.add_argument("--m", type=int, nargs="+", help="Vector dimensions")
    parser.add_argument("--correlation", type=float, nargs="+", help="Common off-diagonal correlations")
    parser.add_argument("--reps", type=int, help="Repetitions per cell")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--out", help="Output CSV")
    parser.set_defaults(handler=run)


def run(args) -> int:
    started = time.perf_counter()
    require(args, "out")
    fields: Dict[str, Any] = {}
    for name in ("alpha", "n", "m", "correlation", "seed"):
        if getattr(args, name) is not None:
            fields[name] = getattr(args, name)
    if args.reps is not None:
        fields["repetitions"] = args.reps
    grid = CalibrationGrid(**fields)

    rows = calibration_service.run(grid)
    df = pd.DataFrame.from_records([r.model_dump() for r in rows], columns=CALIBRATION_COLUMNS)
    out = Path(args.out)
    csv_provider.write_table(df, out)
    write_manifest(args, started, [out], manifest_path(out), seed=grid.seed)
    return 0
