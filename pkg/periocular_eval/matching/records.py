"""
Score records and fusion configuration.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from ..data import GENUINE, IMPOSTOR

FUSED = "fused"


class MatchingError(ValueError):
    """Raised for invalid comparisons or incomplete score records."""


@dataclass(frozen=True)
class ScoreRecord:
    """Similarity scores of one comparison pair (higher means more alike)."""
    sample_id_a: str
    sample_id_b: str
    label: str
    matcher_scores: Dict[str, float] = field(default_factory=dict)
    fused_score: Optional[float] = None

    def __post_init__(self):
        if self.label not in (GENUINE, IMPOSTOR):
            raise MatchingError(f"{self.key}: label must be genuine or impostor, got '{self.label}'")
        for matcher_id, score in self.matcher_scores.items():
            if not math.isfinite(score):
                raise MatchingError(f"{self.key}: score of '{matcher_id}' is not finite")
        if self.fused_score is not None and not 0.0 <= self.fused_score <= 1.0:
            raise MatchingError(f"{self.key}: fused score {self.fused_score} outside [0, 1]")

    @property
    def key(self) -> str:
        return f"{self.sample_id_a}/{self.sample_id_b}"

    @property
    def genuine(self) -> bool:
        return self.label == GENUINE

    def score(self, matcher_id: str) -> float:
        """Score of one matcher, or the fused score for matcher_id 'fused'."""
        if matcher_id == FUSED:
            if self.fused_score is None:
                raise MatchingError(f"record {self.key} has no fused score")
            return self.fused_score
        try:
            return self.matcher_scores[matcher_id]
        except KeyError:
            raise MatchingError(f"record {self.key} has no score for matcher '{matcher_id}'") from None


@dataclass(frozen=True)
class FusionConfig:
    """Ordered matchers and their non-negative weights (summing to 1)."""
    matcher_ids: Tuple[str, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "matcher_ids", tuple(self.matcher_ids))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.matcher_ids:
            raise MatchingError("fusion needs at least one matcher")
        if len(set(self.matcher_ids)) != len(self.matcher_ids):
            raise MatchingError(f"duplicate matcher ids in fusion config: {list(self.matcher_ids)}")
        if len(self.weights) != len(self.matcher_ids):
            raise MatchingError(f"{len(self.matcher_ids)} matchers but {len(self.weights)} weights")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise MatchingError(f"fusion weights must be finite and non-negative: {list(self.weights)}")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise MatchingError(f"fusion weights must sum to 1, got {math.fsum(self.weights)!r}")

    @classmethod
    def uniform(cls, matcher_ids: Sequence[str]) -> "FusionConfig":
        n = len(matcher_ids)
        return cls(tuple(matcher_ids), tuple([1.0 / n] * n))

    @classmethod
    def from_weights(cls, matcher_ids: Sequence[str], weights: Optional[Sequence[float]] = None) -> "FusionConfig":
        """Uniform when weights is None; otherwise rescaled to sum to 1."""
        if weights is None:
            return cls.uniform(matcher_ids)
        total = math.fsum(weights)
        if total <= 0:
            raise MatchingError(f"fusion weights must have a positive sum: {list(weights)}")
        return cls(tuple(matcher_ids), tuple(w / total for w in weights))
