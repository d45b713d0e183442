"""
Binary embedding files written by an external deep model.

Layout (little-endian): 4-byte magic "PEMB", 1-byte version (1),
uint32 dimension, then dimension float32 values.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from .base import FeatureVector

logger = logging.getLogger(__name__)

MAGIC = b"PEMB"
VERSION = 1
EMBEDDING_DIM = 256
HEADER = np.dtype([("magic", "S4"), ("version", "u1"), ("dim", "<u4")])
VALUE = np.dtype("<f4")


class EmbeddingFormatError(ValueError):
    """Raised when an embedding file cannot be decoded."""

    def __init__(self, message: str, path: Union[str, Path] = None):
        self.path = Path(path) if path is not None else None
        super().__init__(f"{path}: {message}" if path is not None else message)


class BadMagicError(EmbeddingFormatError):
    pass


class DimensionMismatchError(EmbeddingFormatError):
    pass


class NonFiniteValueError(EmbeddingFormatError):
    pass


class ZeroNormError(EmbeddingFormatError):
    pass


def decode_embedding(data: bytes, expected_dim: int = EMBEDDING_DIM, path=None) -> FeatureVector:
    """Decode the bytes of one embedding file."""
    if len(data) < HEADER.itemsize:
        raise BadMagicError(f"file too short for a header ({len(data)} bytes)", path)
    header = np.frombuffer(data, dtype=HEADER, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise BadMagicError(f"bad magic {bytes(header['magic'])!r}, expected {MAGIC!r}", path)
    if int(header["version"]) != VERSION:
        raise EmbeddingFormatError(f"unsupported version {int(header['version'])}", path)

    dim = int(header["dim"])
    if dim != expected_dim:
        raise DimensionMismatchError(f"dimension {dim}, expected {expected_dim}", path)
    payload = len(data) - HEADER.itemsize
    if payload != dim * VALUE.itemsize:
        raise DimensionMismatchError(f"header declares {dim} values but payload holds {payload} bytes", path)

    values = np.frombuffer(data, dtype=VALUE, count=dim, offset=HEADER.itemsize).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError("embedding contains NaN or Inf", path)
    if not np.any(values):
        raise ZeroNormError("embedding has zero norm", path)
    return FeatureVector(values, extractor_id=f"deep-{dim}")


def load_embedding(path: Union[str, Path], expected_dim: int = EMBEDDING_DIM) -> FeatureVector:
    """
    Read a precomputed embedding.

    Parameters:
    - path: embedding file
    - expected_dim: required dimension (256 for the reference model)

    Returns:
    - FeatureVector with extractor_id "deep-<dim>"
    """
    path = Path(path)
    return decode_embedding(path.read_bytes(), expected_dim, path)


def encode_embedding(values) -> bytes:
    values = np.asarray(values, dtype=VALUE).ravel()
    header = np.array([(MAGIC, VERSION, len(values))], dtype=HEADER)
    return header.tobytes() + values.tobytes()


def save_embedding(values, path: Union[str, Path]) -> Path:
    """Write an embedding in the same layout load_embedding reads."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_embedding(values))
    return path
