import logging
import time
from pathlib import Path

from ..providers import csv_provider
from ..services.preprocess_service import PreprocessService
from ..utils.run_manifest import write_manifest
from .common import manifest_path, require

logger = logging.getLogger(__name__)

preprocess_service = PreprocessService()


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "detrend", help="Replace every column by its demeaned AR(1) residuals"
    )
    parser.add_argument("--input", help="Input CSV")
    parser.add_argument("--out", help="Output CSV (one row shorter than the input)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    started = time.perf_counter()
    require(args, "input", "out")
    frame = csv_provider.read_frame(args.input)
    detrended = preprocess_service.detrend(frame)
    out = Path(args.out)
    csv_provider.write_frame(detrended, out)
    write_manifest(args, started, [out], manifest_path(out), inputs=[args.input])
    return 0
