"""Sub-commands of the command line; each module exposes ``register(subparsers)``."""

from . import calibrate, detrend, irf, learn, montecarlo, simulate

COMMANDS = (simulate, detrend, learn, montecarlo, calibrate, irf)

__all__ = ["COMMANDS"]
