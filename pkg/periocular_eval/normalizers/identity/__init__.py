"""
Identity normalizer used to check that the normalized branch of the
pipeline reproduces the original branch exactly.
"""

from .normalizer import IdentityNormalizer

__all__ = ["IdentityNormalizer"]
