"""Learning the state-space structure of macroeconomic time series."""

__version__ = "1.0.0"
