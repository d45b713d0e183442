"""
Min-max score normalization and weighted-sum fusion.
"""

import logging
from dataclasses import replace
from typing import List, Mapping, Sequence

import numpy as np

from .records import FusionConfig, MatchingError, ScoreRecord

logger = logging.getLogger(__name__)


def minmax_normalize(scores: Sequence[float]) -> np.ndarray:
    """
    Affine map sending min to 0 and max to 1.

    A constant column maps to 0.5 everywhere.
    """
    values = np.asarray(scores, dtype=np.float64)
    if values.ndim != 1 or len(values) < 2:
        raise MatchingError(f"min-max normalization needs at least 2 scores, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise MatchingError("cannot normalize non-finite scores")
    low, high = values.min(), values.max()
    if high == low:
        return np.full_like(values, 0.5)
    return np.clip((values - low) / (high - low), 0.0, 1.0)


def fuse_columns(columns: Mapping[str, Sequence[float]], cfg: FusionConfig) -> np.ndarray:
    """
    Fuse raw score columns keyed by matcher id.

    Every column is min-max normalized over all rows first (one reduction
    pass), then combined row-wise with the configured weights.
    """
    missing = [m for m in cfg.matcher_ids if m not in columns]
    if missing:
        raise MatchingError(f"no scores for matcher(s) {missing}")
    fused = None
    for matcher_id, weight in zip(cfg.matcher_ids, cfg.weights):
        normalized = minmax_normalize(columns[matcher_id])
        fused = weight * normalized if fused is None else fused + weight * normalized
    return np.clip(fused, 0.0, 1.0)


def fuse_scores(records: List[ScoreRecord], cfg: FusionConfig) -> List[ScoreRecord]:
    """
    Attach fused scores to records, preserving their order.

    Raises:
        MatchingError: a record lacks a score of one of cfg.matcher_ids
    """
    columns = {}
    for matcher_id in cfg.matcher_ids:
        column = []
        for record in records:
            if matcher_id not in record.matcher_scores:
                raise MatchingError(f"record {record.key} has no score for matcher '{matcher_id}'")
            column.append(record.matcher_scores[matcher_id])
        columns[matcher_id] = column

    fused = fuse_columns(columns, cfg)
    logger.debug(f"Fused {len(records)} records over {list(cfg.matcher_ids)}")
    return [replace(record, fused_score=float(score)) for record, score in zip(records, fused)]
