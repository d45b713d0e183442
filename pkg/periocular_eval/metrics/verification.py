"""
Verification metrics over genuine/impostor score sets.

All scores are similarities: a pair is accepted at threshold t when its
score is >= t. Every function here is O(n log n) in the number of scores.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from sklearn import metrics

logger = logging.getLogger(__name__)


class MetricsError(ValueError):
    """Raised when a metric is undefined for the given scores."""


class DegenerateDistributionError(MetricsError):
    """
    Zero pooled variance.

    `infinite` is True when the two means differ (unbounded separation) and
    False when both distributions collapse onto the same value.
    """

    def __init__(self, message: str, infinite: bool):
        super().__init__(message)
        self.infinite = infinite


@dataclass(frozen=True, eq=False)
class ScoreSet:
    """Genuine and impostor similarity scores."""
    genuine: np.ndarray
    impostor: np.ndarray

    def __post_init__(self):
        for name in ("genuine", "impostor"):
            values = np.array(getattr(self, name), dtype=np.float64, copy=True).ravel()
            if not np.all(np.isfinite(values)):
                raise MetricsError(f"{name} scores contain non-finite values")
            values.setflags(write=False)
            object.__setattr__(self, name, values)

    @property
    def counts(self) -> Tuple[int, int]:
        return len(self.genuine), len(self.impostor)

    def require_both(self) -> None:
        if len(self.genuine) == 0 or len(self.impostor) == 0:
            raise MetricsError(f"need genuine and impostor scores, got counts {self.counts}")

    def swapped(self) -> "ScoreSet":
        return ScoreSet(self.impostor, self.genuine)


def decidability(s: ScoreSet) -> float:
    """
    d' = |mu_G - mu_I| / sqrt((var_G + var_I) / 2) with sample (n-1) variances.

    Raises:
        MetricsError: fewer than two scores on a side
        DegenerateDistributionError: pooled variance is zero
    """
    if len(s.genuine) < 2 or len(s.impostor) < 2:
        raise MetricsError(f"decidability needs at least 2 scores per side, got counts {s.counts}")
    mean_g, mean_i = s.genuine.mean(), s.impostor.mean()
    pooled = (s.genuine.var(ddof=1) + s.impostor.var(ddof=1)) / 2.0
    if pooled == 0:
        infinite = bool(mean_g != mean_i)
        raise DegenerateDistributionError(
            "zero pooled variance: " + ("separation is infinite" if infinite else "distributions are identical constants"),
            infinite=infinite,
        )
    return float(abs(mean_g - mean_i) / math.sqrt(pooled))


def _labels_and_scores(s: ScoreSet) -> Tuple[np.ndarray, np.ndarray]:
    s.require_both()
    n_g, n_i = s.counts
    labels = np.concatenate([np.ones(n_g, dtype=np.int64), np.zeros(n_i, dtype=np.int64)])
    return labels, np.concatenate([s.genuine, s.impostor])


def auc(s: ScoreSet) -> float:
    """Mann-Whitney AUC: P(genuine > impostor) with ties counted as 1/2."""
    labels, scores = _labels_and_scores(s)
    return float(metrics.roc_auc_score(labels, scores))


@dataclass(frozen=True, eq=False)
class RocCurve:
    """
    Operating points ordered from the strictest threshold (+inf) to the loosest.

    far[k] and tar[k] are the fractions of impostor and genuine scores that
    are >= thresholds[k].
    """
    thresholds: np.ndarray
    far: np.ndarray
    tar: np.ndarray

    def __len__(self) -> int:
        return len(self.far)

    def points(self) -> List[Tuple[float, float]]:
        return [(float(f), float(t)) for f, t in zip(self.far, self.tar)]

    @property
    def frr(self) -> np.ndarray:
        return 1.0 - self.tar

    def area(self) -> float:
        """Trapezoidal area under the curve."""
        return float(np.sum(np.diff(self.far) * (self.tar[1:] + self.tar[:-1])) / 2.0)


def roc_curve(s: ScoreSet) -> RocCurve:
    """
    ROC with one point per distinct score value plus the (0, 0) point of
    the +inf threshold; the last point is always (1, 1).
    """
    labels, scores = _labels_and_scores(s)
    far, tar, thresholds = metrics.roc_curve(labels, scores, pos_label=1, drop_intermediate=False)
    return RocCurve(thresholds=thresholds, far=far, tar=tar)


def eer(s: ScoreSet, roc: RocCurve = None) -> float:
    """
    Equal error rate, linearly interpolated between adjacent ROC points
    where FAR - FRR changes sign.
    """
    roc = roc_curve(s) if roc is None else roc
    diff = roc.far - roc.frr
    k = int(np.argmax(diff >= 0))
    if diff[k] == 0 or k == 0:
        return float(roc.far[k])
    d0, d1 = diff[k - 1], diff[k]
    t = -d0 / (d1 - d0)
    return float(roc.far[k - 1] + t * (roc.far[k] - roc.far[k - 1]))


def summarize(values: np.ndarray) -> Tuple[float, float]:
    """(mean, sample std); std is 0 for fewer than two values."""
    if len(values) == 0:
        return math.nan, math.nan
    std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return float(values.mean()), std
