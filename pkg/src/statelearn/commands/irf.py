import logging
import time
from pathlib import Path

import numpy as np

from ..config import section
from ..exceptions import ConfigError
from ..models.irf import IrfRequest
from ..providers import csv_provider
from ..services.irf_service import IrfService
from ..utils.run_manifest import write_manifest
from .common import load_params, manifest_path, require

logger = logging.getLogger(__name__)

irf_service = IrfService()

_irf = section("irf")


def register(subparsers) -> None:
    parser = subparsers.add_parser("irf", help="Impulse responses as a long-format CSV")
    parser.add_argument("--model", help="Model parameters JSON (e.g. winner.json)")
    parser.add_argument("--input", help="Observations CSV, used with --var1")
    parser.add_argument("--var1", action="store_true", default=False, help="Fit an unrestricted VAR(1) baseline")
    parser.add_argument("--shock", help="Variable receiving the impulse")
    parser.add_argument("--magnitude", type=float, default=float(_irf.get("magnitude", 1.0)), help="Impulse size (shock s.d. unless --no-scale)")
    parser.add_argument("--horizon", type=int, default=int(_irf.get("horizon", 40)), help="Periods after impact")
    parser.add_argument(
        "--no-scale", action="store_true", default=False, help="Take --magnitude in the variable's own units"
    )
    parser.add_argument(
        "--allow-nonstationary", action="store_true", default=False, help="Propagate an explosive VAR(1)"
    )
    parser.add_argument("--out", help="Output CSV (period, variable, response)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    started = time.perf_counter()
    require(args, "shock", "out")
    if args.horizon < 0:
        raise ConfigError("--horizon must be non-negative")
    rows = args.horizon + 1  # impact plus propagation periods

    if args.var1:
        require(args, "input")
        frame = csv_provider.read_frame(args.input)
        fit = irf_service.fit_var1(frame)
        shock = np.zeros(frame.k)
        shock[frame.indices([args.shock])[0]] = args.magnitude
        path = irf_service.irf_var1(
            fit.coef, shock, rows, names=frame.names,
            allow_nonstationary=args.allow_nonstationary, shocked=args.shock,
        )
        inputs = [args.input]
    else:
        if args.model is None:
            raise ConfigError("Give --model, or --input with --var1")
        request = IrfRequest(
            params=load_params(args.model),
            shocked=args.shock,
            magnitude=args.magnitude,
            horizon=rows,
            scale_by_sd=not args.no_scale,
        )
        path = irf_service.irf_statespace(request)
        inputs = [args.model]

    out = Path(args.out)
    csv_provider.write_table(path.to_long(), out)
    write_manifest(args, started, [out], manifest_path(out), inputs=inputs)
    return 0
