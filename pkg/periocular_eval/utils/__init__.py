"""
Utilities module for periocular_eval.

This module provides configuration, logging setup and plotting helpers.
"""

from .config import (
    DEFAULT_CONFIG,
    ConfigError,
    ExperimentConfig,
    debug_enabled,
    get_config,
    load_config,
    save_config,
)
from .logging import setup_logging
from .visualization import plot_roc, plot_score_histograms

__all__ = [
    'DEFAULT_CONFIG',
    'ConfigError',
    'ExperimentConfig',
    'debug_enabled',
    'get_config',
    'load_config',
    'save_config',
    'setup_logging',
    'plot_roc',
    'plot_score_histograms',
]
