"""Helpers shared by the sub-command modules."""

import json
import logging
from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from pathlib import Path
from typing import Any, Dict

from ..config import default_jobs, section
from ..exceptions import ConfigError
from ..models.params import SimConfig, StateSpaceParams
from ..models.reports import SearchConfig
from ..providers import preset_provider

logger = logging.getLogger(__name__)


def require(args: Namespace, *names: str) -> None:
    """argparse ``required=True`` would ignore values supplied by ``--config``."""
    missing = ["--" + n.replace("_", "-") for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError("Missing required option(s): " + ", ".join(missing))


def manifest_path(output: Path) -> Path:
    """``results/data.csv`` -> ``results/data.manifest.json``."""
    return output.with_name(output.stem + ".manifest.json")


def load_json(path: str | Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


def load_params(path: str | Path) -> StateSpaceParams:
    """Read model parameters, either bare or wrapped under ``params`` as in winner.json."""
    data = load_json(path)
    if "params" in data and isinstance(data["params"], dict):
        data = data["params"]
    return StateSpaceParams.model_validate(data)


def add_model_source(parser: ArgumentParser) -> None:
    parser.add_argument("--preset", help="Built-in model: " + ", ".join(preset_provider.names()))
    parser.add_argument("--params", help="JSON file with model parameters (e.g. a winner.json)")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--burn-in", type=int, help="Rows discarded before the kept sample")
    parser.add_argument(
        "--observation-noise",
        action=BooleanOptionalAction,
        default=None,
        help="Add Gaussian noise with the configured variances to endogenous states and controls "
        "(default: on for --preset, off for --params)",
    )


def sim_config_from_args(args: Namespace, n: int) -> SimConfig:
    if (args.preset is None) == (args.params is None):
        raise ConfigError("Give exactly one of --preset or --params")
    if args.preset is not None:
        params = preset_provider.params(args.preset)
    else:
        params = load_params(args.params)
    if args.observation_noise is None:
        # resolved here so the manifest records the value used
        args.observation_noise = args.preset is not None
    fields: Dict[str, Any] = {
        "params": params,
        "n": n,
        "seed": args.seed if args.seed is not None else int(section("simulation").get("seed", 0)),
        "observation_noise": bool(args.observation_noise),
    }
    if args.burn_in is not None:
        fields["burn_in"] = args.burn_in
    return SimConfig(**fields)


def add_search_options(parser: ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, help="Significance level")
    parser.add_argument(
        "--test", dest="strategy", choices=["multiple", "srivastava", "score-only"], help="Validity strategy"
    )
    parser.add_argument("--score", choices=["loglik", "bic", "aic"], help="Ranking key in score-only mode")
    parser.add_argument("--max-states", type=int, help="Largest tier to evaluate (default k-2)")
    parser.add_argument("--guard-tol", type=float, help="Relative residual-variance guard")
    parser.add_argument("--jobs", type=int, default=default_jobs(), help="Worker processes")
    parser.add_argument("--no-early-stop", action="store_true", default=False, help="Evaluate every tier")
    parser.add_argument(
        "--exclude-endo-lagexo",
        action="store_true",
        default=False,
        help="Skip the time-t endogenous vs lagged exogenous tests",
    )
    parser.add_argument(
        "--include-lag2-exo",
        action="store_true",
        default=False,
        help="Add z[t-2] to the diagonal-covariance test vector",
    )


def search_config_from_args(args: Namespace) -> SearchConfig:
    fields: Dict[str, Any] = {
        "parallelism": args.jobs,
        "include_lag2_exo": bool(args.include_lag2_exo),
    }
    for name in ("alpha", "strategy", "score", "max_states", "guard_tol"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if args.no_early_stop:
        fields["early_stop"] = False
    if args.exclude_endo_lagexo:
        fields["include_endo_lagexo"] = False
    return SearchConfig(**fields)
