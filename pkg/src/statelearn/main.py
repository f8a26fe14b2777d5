import argparse
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .commands import COMMANDS
from .commands.common import load_json
from .exceptions import ConfigError, ControlShockError, DataError, NonStationaryError

# Configure logging
log_level = os.getenv('LOG_LEVEL', 'INFO').upper()
logging.basicConfig(
    level=getattr(logging, log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NO_MODEL = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1 instead of argparse's 2, which is reserved for data errors."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="statelearn",
        description="Learn which observables are exogenous states, endogenous states and controls",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config", help="JSON file (or a run manifest) supplying option defaults by name"
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: List[str]) -> None:
    """Feed ``--config`` values to the chosen sub-command as defaults, so explicit flags win."""
    pre, _ = parser.parse_known_args(argv)
    if not pre.config or not pre.command:
        return
    data = load_json(pre.config)
    if "command" in data and isinstance(data.get("config"), dict):
        if data["command"] != pre.command:
            raise ConfigError(f"Manifest is for '{data['command']}', not '{pre.command}'")
        data = data["config"]
    sub = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    ).choices[pre.command]
    known = {action.dest for action in sub._actions}
    unknown = sorted(set(data) - known)
    if unknown:
        logger.warning("Ignoring unknown config keys: %s", ", ".join(unknown))
    sub.set_defaults(**{k: v for k, v in data.items() if k in known})
    logger.info("Applied %d option(s) from %s", len(set(data) & known), pre.config)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, OSError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    logger.info("Running %s (log level %s)", args.command, log_level)
    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_USAGE
    except (ConfigError, ControlShockError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (DataError, NonStationaryError, OSError) as e:
        logger.error("%s", e)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
