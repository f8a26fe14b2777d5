"""
Data sources for the learner.

- CsvProvider: observation frames and result tables on disk
- PresetProvider: built-in state-space models for simulation
"""

from .csv_provider import CsvProvider, csv_provider
from .preset_provider import PRESETS, PresetProvider, preset_provider

# Shared singletons, imported by commands instead of creating new instances.
__all__ = [
    "PRESETS",
    "CsvProvider",
    "PresetProvider",
    "csv_provider",
    "preset_provider",
]
