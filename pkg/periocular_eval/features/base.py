"""
Base types for feature representations and the extractor interface.

Every extractor turns a GrayImage into either a dense FeatureVector or a
KeypointSet. Extractors are pure and hold only their configuration, so one
instance may be shared across worker threads.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, NamedTuple, Union

import numpy as np

from ..imaging import GrayImage

DESCRIPTOR_SIZE = 128


class FeatureError(ValueError):
    """Raised when a feature cannot be extracted or is malformed."""


class ExtractorType(Enum):
    """Available feature extractors."""
    LBP = "lbp"
    LPQ = "lpq"
    HOG = "hog"
    SIFT = "sift"
    MBTLBP = "mbtlbp"


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Dense descriptor with the id of the extractor that produced it."""
    values: np.ndarray
    extractor_id: str

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if not np.all(np.isfinite(values)):
            raise FeatureError(f"{self.extractor_id}: feature vector contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dims(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.extractor_id == other.extractor_id and bool(np.array_equal(self.values, other.values))


class Keypoint(NamedTuple):
    x: float
    y: float
    scale: float
    orientation: float
    descriptor: np.ndarray


@dataclass(frozen=True, eq=False)
class KeypointSet:
    """
    Localized SIFT descriptors.

    points holds one (x, y, scale, orientation) row per keypoint and
    descriptors one L2-normalized 128-d row.
    """
    points: np.ndarray
    descriptors: np.ndarray
    extractor_id: str = "sift"

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64, copy=True).reshape(-1, 4)
        descriptors = np.array(self.descriptors, dtype=np.float64, copy=True).reshape(-1, DESCRIPTOR_SIZE)
        if len(points) != len(descriptors):
            raise FeatureError(f"{len(points)} keypoints but {len(descriptors)} descriptors")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(descriptors))):
            raise FeatureError("keypoint set contains non-finite values")
        points.setflags(write=False)
        descriptors.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "descriptors", descriptors)

    @classmethod
    def empty(cls, extractor_id: str = "sift") -> "KeypointSet":
        return cls(np.zeros((0, 4)), np.zeros((0, DESCRIPTOR_SIZE)), extractor_id)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Keypoint]:
        for (x, y, scale, orientation), descriptor in zip(self.points, self.descriptors):
            yield Keypoint(float(x), float(y), float(scale), float(orientation), descriptor)

    @property
    def keypoints(self):
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KeypointSet):
            return NotImplemented
        return (self.extractor_id == other.extractor_id
                and bool(np.array_equal(self.points, other.points))
                and bool(np.array_equal(self.descriptors, other.descriptors)))


Feature = Union[FeatureVector, KeypointSet]


def l1_normalize(histogram: np.ndarray) -> np.ndarray:
    total = histogram.sum()
    if total <= 0:
        return histogram.astype(np.float64)
    return histogram.astype(np.float64) / total


class FeatureExtractor(ABC):
    """Abstract base class for image feature extractors."""

    @property
    @abstractmethod
    def extractor_id(self) -> str:
        """Stable id naming the representation and its key parameters."""
        pass

    @property
    @abstractmethod
    def config(self) -> Dict[str, Any]:
        """Parameters that change the output; part of the cache key."""
        pass

    @property
    def produces_keypoints(self) -> bool:
        return False

    @abstractmethod
    def extract(self, img: GrayImage) -> Feature:
        """
        Extract the representation of one preprocessed image.

        Args:
            img: 256x256 periocular crop (any size the extractor accepts)

        Returns:
            FeatureVector or KeypointSet
        """
        pass


def get_extractor(extractor_type: ExtractorType, **config) -> FeatureExtractor:
    """
    Factory function to get an extractor instance.

    Args:
        extractor_type: Which representation to compute
        **config: Extractor-specific parameters

    Returns:
        Configured FeatureExtractor instance
    """
    extractor_type = ExtractorType(extractor_type)
    if extractor_type == ExtractorType.LBP:
        from .texture import LbpExtractor
        return LbpExtractor(**config)
    elif extractor_type == ExtractorType.LPQ:
        from .texture import LpqExtractor
        return LpqExtractor(**config)
    elif extractor_type == ExtractorType.MBTLBP:
        from .texture import MbtlbpExtractor
        return MbtlbpExtractor(**config)
    elif extractor_type == ExtractorType.HOG:
        from .hog import HogExtractor
        return HogExtractor(**config)
    elif extractor_type == ExtractorType.SIFT:
        from .sift import SiftExtractor
        return SiftExtractor(**config)
    else:
        raise ValueError(f"Unknown extractor type: {extractor_type}")
