import logging
import time
from pathlib import Path

import pandas as pd

from ..config import section
from ..models.reports import MonteCarloResult
from ..providers import csv_provider
from ..services.search_service import SearchService
from ..utils.run_manifest import write_manifest
from .common import (
    add_model_source,
    add_search_options,
    manifest_path,
    require,
    search_config_from_args,
    sim_config_from_args,
)

logger = logging.getLogger(__name__)

TALLY_COLUMNS = ["index", "exogenous_states", "endogenous_states", "wins", "valid"]


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "montecarlo", help="Repeat the search on fresh simulated samples and tally wins"
    )
    add_model_source(parser)
    parser.add_argument("--reps", type=int, help="Replications")
    parser.add_argument("--n", type=int, help="Rows per replication")
    add_search_options(parser)
    parser.add_argument("--out", help="Tally CSV")
    parser.set_defaults(handler=run)


def tally_table(result: MonteCarloResult) -> pd.DataFrame:
    return pd.DataFrame.from_records(
        [
            {
                "index": row.index,
                "exogenous_states": list(row.exogenous_states),
                "endogenous_states": list(row.endogenous_states),
                "wins": row.wins,
                "valid": row.valid,
            }
            for row in result.rows
        ],
        columns=TALLY_COLUMNS,
    )


def run(args) -> int:
    started = time.perf_counter()
    require(args, "reps", "out")
    n = args.n if args.n is not None else int(section("simulation").get("n", 100_000))
    sim = sim_config_from_args(args, n)
    cfg = search_config_from_args(args)

    result = SearchService().monte_carlo(cfg, sim, args.reps, n)
    out = Path(args.out)
    csv_provider.write_table(tally_table(result), out)
    logger.info(
        "%d replications: %d without a valid model, %d skipped; winner tiers %s",
        result.reps, result.no_winner, result.skipped, result.tier_histogram(),
    )
    inputs = [args.params] if args.params else []
    write_manifest(args, started, [out], manifest_path(out), inputs=inputs, seed=sim.seed)
    return 0
