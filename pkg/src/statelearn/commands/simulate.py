import logging
import time
from pathlib import Path

from ..config import section
from ..providers import csv_provider
from ..services.simulation_service import SimulationService
from ..utils.run_manifest import write_manifest
from .common import add_model_source, manifest_path, require, sim_config_from_args

logger = logging.getLogger(__name__)

simulation_service = SimulationService()


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Simulate a state-space model to CSV")
    add_model_source(parser)
    parser.add_argument("--n", type=int, help="Rows to keep (default simulation.n)")
    parser.add_argument("--out", help="Output CSV")
    parser.set_defaults(handler=run)


def run(args) -> int:
    started = time.perf_counter()
    require(args, "out")
    n = args.n if args.n is not None else int(section("simulation").get("n", 100_000))
    sim = sim_config_from_args(args, n)
    frame = simulation_service.simulate(sim)

    out = Path(args.out)
    csv_provider.write_frame(frame, out)
    inputs = [args.params] if args.params else []
    write_manifest(args, started, [out], manifest_path(out), inputs=inputs, seed=sim.seed)
    return 0
