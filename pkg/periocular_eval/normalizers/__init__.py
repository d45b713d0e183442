"""
Normalizer abstraction layer for attribute-editing tools.

This module provides one interface over the built-in identity copy and any
external normalizer reachable through a command line.
"""

from .base import (
    Normalizer,
    NormalizerError,
    NormalizerType,
    get_normalizer,
    normalizer_for,
)

__all__ = [
    "Normalizer",
    "NormalizerError",
    "NormalizerType",
    "get_normalizer",
    "normalizer_for",
]
