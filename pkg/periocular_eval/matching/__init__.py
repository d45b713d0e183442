"""
Matching module: similarity scoring, score normalization and fusion.
"""

from .records import FUSED, FusionConfig, MatchingError, ScoreRecord
from .similarity import DEFAULT_RATIO, cosine_similarity, cosine_similarity_matrix, sift_match_score
from .fusion import fuse_columns, fuse_scores, minmax_normalize
from .io import (
    check_complete,
    from_long,
    fuse_table,
    load_fused,
    load_scores,
    matcher_columns,
    records_to_table,
    save_fused,
    save_scores,
    table_to_records,
    to_long,
)

__all__ = [
    "FUSED",
    "FusionConfig",
    "MatchingError",
    "ScoreRecord",
    "DEFAULT_RATIO",
    "cosine_similarity",
    "cosine_similarity_matrix",
    "sift_match_score",
    "fuse_columns",
    "fuse_scores",
    "minmax_normalize",
    "check_complete",
    "from_long",
    "fuse_table",
    "load_fused",
    "load_scores",
    "matcher_columns",
    "records_to_table",
    "save_fused",
    "save_scores",
    "table_to_records",
    "to_long",
]
