"""
Pairwise similarity functions.

Scores are similarities throughout: cosine similarity for dense vectors and
a ratio-test match fraction for SIFT keypoint sets.
"""

import logging
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..features import FeatureVector, KeypointSet
from .records import MatchingError

logger = logging.getLogger(__name__)

DEFAULT_RATIO = 0.75


def _as_array(v) -> np.ndarray:
    return v.values if isinstance(v, FeatureVector) else np.asarray(v, dtype=np.float64).ravel()


def cosine_similarity(a, b) -> float:
    """
    <a, b> / (|a| |b|), clamped to [-1, 1].

    Args:
        a, b: FeatureVector or 1-d arrays of equal length

    Raises:
        MatchingError: dimension mismatch or zero-norm input
    """
    x, y = _as_array(a), _as_array(b)
    if x.shape != y.shape:
        raise MatchingError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise MatchingError("cosine similarity is undefined for a zero-norm vector")
    return float(np.clip(np.dot(x, y) / (nx * ny), -1.0, 1.0))


def cosine_similarity_matrix(x: np.ndarray, zero_norm_score: Optional[float] = None) -> np.ndarray:
    """
    All-against-all cosine similarities of the rows of x.

    Rows with zero norm raise unless zero_norm_score is given, in which case
    every comparison involving them gets that score.
    """
    x = np.asarray(x, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    zero = norms == 0
    if zero.any() and zero_norm_score is None:
        raise MatchingError(f"cosine similarity is undefined for {int(zero.sum())} zero-norm vector(s)")
    unit = np.divide(x, norms[:, None], out=np.zeros_like(x), where=~zero[:, None])
    gram = np.clip(unit @ unit.T, -1.0, 1.0)
    if zero.any():
        gram[zero, :] = zero_norm_score
        gram[:, zero] = zero_norm_score
    return gram


def _directional_matches(a: np.ndarray, b: np.ndarray, ratio: float) -> int:
    distances = cdist(a, b, metric="euclidean")
    if distances.shape[1] == 1:
        nearest = distances[:, 0]
        second = np.full_like(nearest, np.inf)
    else:
        two = np.partition(distances, 1, axis=1)[:, :2]
        nearest, second = two[:, 0], two[:, 1]
    return int(np.count_nonzero(nearest < ratio * second))


def sift_match_score(a: KeypointSet, b: KeypointSet, ratio: float = DEFAULT_RATIO, symmetric: bool = False) -> float:
    """
    Fraction of keypoints passing the nearest/second-nearest ratio test.

    For every descriptor of `a` the two closest descriptors of `b` are found;
    a match is counted when d1 < ratio * d2. The count is divided by
    min(|a|, |b|) and clamped to [0, 1]. Either set empty gives 0. With
    symmetric=True the a->b and b->a scores are averaged.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    if len(a) == 0 or len(b) == 0:
        return 0.0

    denominator = min(len(a), len(b))
    forward = min(1.0, _directional_matches(a.descriptors, b.descriptors, ratio) / denominator)
    if not symmetric:
        return forward
    backward = min(1.0, _directional_matches(b.descriptors, a.descriptors, ratio) / denominator)
    return 0.5 * (forward + backward)
