"""
Features module: handcrafted texture and gradient descriptors plus precomputed embeddings.
"""

from .base import (
    DESCRIPTOR_SIZE,
    ExtractorType,
    Feature,
    FeatureError,
    FeatureExtractor,
    FeatureVector,
    Keypoint,
    KeypointSet,
    get_extractor,
)
from .embedding import (
    BadMagicError,
    DimensionMismatchError,
    EmbeddingFormatError,
    NonFiniteValueError,
    ZeroNormError,
    load_embedding,
    save_embedding,
)
from .hog import HogExtractor, extract_hog, hog_dims
from .sift import SiftExtractor, extract_sift
from .texture import (
    LbpExtractor,
    LpqExtractor,
    MbtlbpExtractor,
    extract_lbp,
    extract_lpq,
    extract_mbtlbp,
    uniform_mapping,
)

__all__ = [
    "DESCRIPTOR_SIZE",
    "ExtractorType",
    "Feature",
    "FeatureError",
    "FeatureExtractor",
    "FeatureVector",
    "Keypoint",
    "KeypointSet",
    "get_extractor",
    "BadMagicError",
    "DimensionMismatchError",
    "EmbeddingFormatError",
    "NonFiniteValueError",
    "ZeroNormError",
    "load_embedding",
    "save_embedding",
    "HogExtractor",
    "extract_hog",
    "hog_dims",
    "SiftExtractor",
    "extract_sift",
    "LbpExtractor",
    "LpqExtractor",
    "MbtlbpExtractor",
    "extract_lbp",
    "extract_lpq",
    "extract_mbtlbp",
    "uniform_mapping",
]
