"""
External attribute normalizer invoked through a command template.
"""

from .normalizer import CommandNormalizer

__all__ = ["CommandNormalizer"]
