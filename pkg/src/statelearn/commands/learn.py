import json
import logging
import time
from pathlib import Path
from typing import Optional

import pandas as pd

from ..exceptions import ConfigError
from ..models.frame import TimeSeriesFrame
from ..models.partition import StatePartition
from ..models.reports import SearchConfig, SearchResult
from ..providers import csv_provider
from ..services.cache_service import CacheService
from ..services.design_service import DesignService
from ..services.search_service import SearchService
from ..utils.run_manifest import MANIFEST_NAME, write_manifest
from .common import add_search_options, require, search_config_from_args

logger = logging.getLogger(__name__)

EXIT_NO_MODEL = 3

design_service = DesignService()


def register(subparsers) -> None:
    parser = subparsers.add_parser("learn", help="Search for the minimal valid state-space partition")
    parser.add_argument("--input", help="Observations CSV")
    parser.add_argument("--out-dir", help="Directory for results.csv, winner.json, search.json, manifest.json")
    add_search_options(parser)
    parser.add_argument(
        "--reference",
        help="Partition to locate in the ranking, e.g. 'exo=g,z;endo=k' (controls default to the rest)",
    )
    parser.add_argument("--cache", action="store_true", default=False, help="Reuse cached evaluations")
    parser.set_defaults(handler=run)


def parse_reference(text: str, frame: TimeSeriesFrame) -> StatePartition:
    ref = StatePartition.parse(text)
    if not ref.controls:
        rest = tuple(n for n in frame.names if n not in ref.names)
        ref = StatePartition(exo_states=ref.exo_states, endo_states=ref.endo_states, controls=rest)
    if set(ref.names) != set(frame.names):
        raise ConfigError(f"Reference partition does not cover the data columns: {text}")
    return ref


def results_table(result: SearchResult, cfg: SearchConfig) -> pd.DataFrame:
    """Ranked models: index, exogenous_states, endogenous_states, log_likelihood (+ score key)."""
    records = []
    for i, report in enumerate(result.valid_models, start=1):
        row = {
            "index": i,
            "exogenous_states": list(report.partition.exo_states),
            "endogenous_states": list(report.partition.endo_states),
            "log_likelihood": report.log_likelihood,
        }
        if cfg.strategy == "score-only" and cfg.score != "loglik":
            row[cfg.score] = report.score.value(cfg.score)
        records.append(row)
    columns = ["index", "exogenous_states", "endogenous_states", "log_likelihood"]
    if cfg.strategy == "score-only" and cfg.score != "loglik":
        columns.append(cfg.score)
    return pd.DataFrame.from_records(records, columns=columns)


def run(args) -> int:
    started = time.perf_counter()
    require(args, "input", "out_dir")
    frame = csv_provider.read_frame(args.input)
    cfg = search_config_from_args(args)
    reference: Optional[StatePartition] = (
        parse_reference(args.reference, frame) if args.reference else None
    )

    service = SearchService(cache_service=CacheService() if args.cache else None)
    result = service.run_search(frame, cfg)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [csv_provider.write_table(results_table(result, cfg), out_dir / "results.csv")]

    dump = result.model_dump(mode="json")
    if reference is not None:
        rank = result.rank_of(reference)
        dump["reference"] = {"partition": reference.encode(), "rank": rank}
        logger.info("Reference %s ranked %s", reference.encode(), rank)
    search_path = out_dir / "search.json"
    with open(search_path, "w", encoding="utf-8") as f:
        json.dump(dump, f, indent=2)
        f.write("\n")
    outputs.append(search_path)

    winner = result.winner
    if winner is not None:
        params = design_service.fit_params(frame, winner.partition)
        winner_path = out_dir / "winner.json"
        with open(winner_path, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "partition": winner.partition.encode(),
                    "log_likelihood": winner.log_likelihood,
                    "params": params.model_dump(),
                },
                f,
                indent=2,
            )
            f.write("\n")
        outputs.append(winner_path)

    write_manifest(args, started, outputs, out_dir / MANIFEST_NAME, inputs=[args.input])
    if winner is None:
        logger.warning("No valid model found after %d tier(s)", result.tiers_completed)
        return EXIT_NO_MODEL
    logger.info("Winner %s", winner.partition.encode())
    return 0
