"""
On-disk feature cache.

An entry is keyed by (sample_id, extractor_id, sha256 of the image bytes and
the extractor/preprocessing configuration). Entries are .npz archives that
carry a checksum of their arrays; a file that fails to load or to verify is
reported, recomputed and overwritten.
"""

import hashlib
import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable, Dict, NamedTuple, Optional, Union

import numpy as np

from ..features import Feature, FeatureVector, KeypointSet

logger = logging.getLogger(__name__)

VECTOR = "vector"
KEYPOINTS = "keypoints"
LOCK_STRIPES = 64


class CacheKey(NamedTuple):
    sample_id: str
    extractor_id: str
    content_hash: str

    @property
    def file_name(self) -> str:
        digest = hashlib.sha256(f"{self.sample_id}\0{self.extractor_id}\0{self.content_hash}".encode("utf-8"))
        return digest.hexdigest() + ".npz"


def content_hash(image_bytes: bytes, config: Dict[str, Any]) -> str:
    h = hashlib.sha256(image_bytes)
    h.update(json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8"))
    return h.hexdigest()


def _checksum(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for array in arrays:
        h.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
    return h.hexdigest()


class CacheCorruptError(ValueError):
    pass


def encode_entry(feature: Feature) -> Dict[str, np.ndarray]:
    if isinstance(feature, KeypointSet):
        return {
            "kind": np.array(KEYPOINTS),
            "extractor_id": np.array(feature.extractor_id),
            "points": feature.points,
            "descriptors": feature.descriptors,
            "checksum": np.array(_checksum(feature.points, feature.descriptors)),
        }
    return {
        "kind": np.array(VECTOR),
        "extractor_id": np.array(feature.extractor_id),
        "values": feature.values,
        "checksum": np.array(_checksum(feature.values)),
    }


def decode_entry(path: Path) -> Feature:
    try:
        with np.load(path, allow_pickle=False) as data:
            kind = str(data["kind"])
            extractor_id = str(data["extractor_id"])
            checksum = str(data["checksum"])
            if kind == VECTOR:
                values = data["values"]
                arrays = (values,)
            elif kind == KEYPOINTS:
                points, descriptors = data["points"], data["descriptors"]
                arrays = (points, descriptors)
            else:
                raise CacheCorruptError(f"unknown entry kind '{kind}'")
    except CacheCorruptError:
        raise
    except Exception as e:
        raise CacheCorruptError(f"unreadable cache entry: {e}") from e

    if _checksum(*arrays) != checksum:
        raise CacheCorruptError("checksum mismatch")
    if kind == VECTOR:
        return FeatureVector(values, extractor_id)
    return KeypointSet(points, descriptors, extractor_id)


class FeatureCache:
    """
    Thread-safe feature cache rooted at a directory.

    Writes go to a temporary file in the entry's directory and are moved into
    place with os.replace, so readers never see a partial entry. Concurrent
    requests for one key are serialized through a fixed set of striped locks.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self.corrupt = 0
        self._stats_lock = threading.Lock()
        self._locks = tuple(threading.Lock() for _ in range(LOCK_STRIPES))

    def key(self, sample_id: str, extractor_id: str, image_bytes: bytes, config: Dict[str, Any]) -> CacheKey:
        return CacheKey(sample_id, extractor_id, content_hash(image_bytes, {"extractor_id": extractor_id, **config}))

    def path(self, key: CacheKey) -> Path:
        return self.root / key.extractor_id / key.file_name

    def _lock(self, key: CacheKey) -> threading.Lock:
        return self._locks[int(key.file_name[:8], 16) % LOCK_STRIPES]

    def _count(self, name: str) -> None:
        with self._stats_lock:
            setattr(self, name, getattr(self, name) + 1)

    def load(self, key: CacheKey) -> Optional[Feature]:
        """Cached feature, or None when absent or corrupt."""
        path = self.path(key)
        if not path.is_file():
            return None
        try:
            return decode_entry(path)
        except CacheCorruptError as e:
            self._count("corrupt")
            logger.warning(f"Corrupt cache entry for {key.sample_id}/{key.extractor_id} ({e}); recomputing")
            return None

    def store(self, key: CacheKey, feature: Feature) -> Path:
        path = self.path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                np.savez(f, **encode_entry(feature))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def get_or_compute(self, key: CacheKey, compute: Callable[[], Feature]) -> Feature:
        with self._lock(key):
            feature = self.load(key)
            if feature is not None:
                self._count("hits")
                return feature
            self._count("misses")
            feature = compute()
            self.store(key, feature)
            return feature

    def stats(self) -> Dict[str, int]:
        with self._stats_lock:
            return {"hits": self.hits, "misses": self.misses, "corrupt": self.corrupt}
