"""
Verification reports: building, JSON/CSV serialization and display formatting.
"""

import json
import logging
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..data import Variant
from ..matching import FUSED, ScoreRecord
from ..matching.io import FLOAT_FORMAT, check_complete
from .verification import (
    DegenerateDistributionError,
    MetricsError,
    RocCurve,
    ScoreSet,
    auc,
    decidability,
    eer,
    roc_curve,
    summarize,
)

logger = logging.getLogger(__name__)

ROC_COLUMNS = ["threshold", "far", "tar"]


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Metrics of one matcher on one image variant."""
    matcher_id: str
    variant: str
    auc: float
    decidability: float
    decidability_infinite: bool
    eer: float
    roc: RocCurve
    n_genuine: int
    n_impostor: int
    genuine_mean: float
    genuine_std: float
    impostor_mean: float
    impostor_std: float

    @property
    def counts(self) -> Tuple[int, int]:
        return self.n_genuine, self.n_impostor

    def to_dict(self) -> Dict[str, Any]:
        thresholds = [None if math.isinf(t) else float(t) for t in self.roc.thresholds]
        return {
            "matcher_id": self.matcher_id,
            "variant": self.variant,
            "auc": self.auc,
            "decidability": None if math.isinf(self.decidability) else self.decidability,
            "decidability_infinite": self.decidability_infinite,
            "eer": self.eer,
            "counts": {"genuine": self.n_genuine, "impostor": self.n_impostor},
            "genuine": {"mean": self.genuine_mean, "std": self.genuine_std},
            "impostor": {"mean": self.impostor_mean, "std": self.impostor_std},
            "roc": {
                "thresholds": thresholds,
                "far": [float(v) for v in self.roc.far],
                "tar": [float(v) for v in self.roc.tar],
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        roc = data["roc"]
        thresholds = np.array([np.inf if t is None else t for t in roc["thresholds"]], dtype=np.float64)
        infinite = bool(data.get("decidability_infinite", False))
        return cls(
            matcher_id=data["matcher_id"],
            variant=data["variant"],
            auc=float(data["auc"]),
            decidability=math.inf if infinite else float(data["decidability"]),
            decidability_infinite=infinite,
            eer=float(data["eer"]),
            roc=RocCurve(thresholds, np.asarray(roc["far"], dtype=np.float64), np.asarray(roc["tar"], dtype=np.float64)),
            n_genuine=int(data["counts"]["genuine"]),
            n_impostor=int(data["counts"]["impostor"]),
            genuine_mean=float(data["genuine"]["mean"]),
            genuine_std=float(data["genuine"]["std"]),
            impostor_mean=float(data["impostor"]["mean"]),
            impostor_std=float(data["impostor"]["std"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, VerificationReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def report_from_scores(s: ScoreSet, matcher_id: str, variant: Union[Variant, str]) -> VerificationReport:
    """Compute every metric of one score set."""
    s.require_both()
    variant = Variant(variant).value
    try:
        d_prime, infinite = decidability(s), False
    except DegenerateDistributionError as e:
        logger.warning(f"{matcher_id} ({variant}): {e}")
        d_prime, infinite = (math.inf, True) if e.infinite else (0.0, False)

    roc = roc_curve(s)
    g_mean, g_std = summarize(s.genuine)
    i_mean, i_std = summarize(s.impostor)
    report = VerificationReport(
        matcher_id=matcher_id,
        variant=variant,
        auc=auc(s),
        decidability=d_prime,
        decidability_infinite=infinite,
        eer=eer(s, roc),
        roc=roc,
        n_genuine=len(s.genuine),
        n_impostor=len(s.impostor),
        genuine_mean=g_mean,
        genuine_std=g_std,
        impostor_mean=i_mean,
        impostor_std=i_std,
    )
    logger.info(f"{matcher_id} ({variant}): AUC {format_auc_percent(report.auc)}%, "
                f"d' {format_decidability(report)}, EER {report.eer:.4f}")
    return report


def build_report(records: Sequence[ScoreRecord], matcher_id: str, variant: Union[Variant, str]) -> VerificationReport:
    """
    Split the records' scores by label and compute all metrics.

    matcher_id 'fused' reads the fused score of each record.
    """
    genuine, impostor = [], []
    for record in records:
        (genuine if record.genuine else impostor).append(record.score(matcher_id))
    if not genuine or not impostor:
        missing = "genuine" if not genuine else "impostor"
        raise MetricsError(f"no {missing} records for matcher '{matcher_id}'")
    return report_from_scores(ScoreSet(genuine, impostor), matcher_id, variant)


def report_from_table(table: pd.DataFrame, matcher_id: str, variant: Union[Variant, str]) -> VerificationReport:
    """build_report over a wide score table."""
    if matcher_id != FUSED:
        check_complete(table, [matcher_id])
    elif FUSED not in table.columns:
        raise MetricsError("table has no fused scores")
    scores = table[matcher_id].to_numpy(dtype=np.float64)
    genuine = (table["label"] == "genuine").to_numpy()
    if genuine.all() or not genuine.any():
        missing = "impostor" if genuine.all() else "genuine"
        raise MetricsError(f"no {missing} records for matcher '{matcher_id}'")
    return report_from_scores(ScoreSet(scores[genuine], scores[~genuine]), matcher_id, variant)


def save_report(report: VerificationReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def load_report(path) -> VerificationReport:
    with open(path, "r", encoding="utf-8") as f:
        return VerificationReport.from_dict(json.load(f))


def save_roc_csv(roc: RocCurve, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"threshold": roc.thresholds, "far": roc.far, "tar": roc.tar}, columns=ROC_COLUMNS)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def load_roc_csv(path) -> RocCurve:
    frame = pd.read_csv(path)
    if list(frame.columns) != ROC_COLUMNS:
        raise MetricsError(f"{path}: ROC file header must be {','.join(ROC_COLUMNS)}")
    return RocCurve(
        thresholds=frame["threshold"].to_numpy(dtype=np.float64),
        far=frame["far"].to_numpy(dtype=np.float64),
        tar=frame["tar"].to_numpy(dtype=np.float64),
    )


def round_half_up(value: float, places: str) -> Decimal:
    return Decimal(repr(float(value))).quantize(Decimal(places), rounding=ROUND_HALF_UP)


def format_auc_percent(value: float) -> str:
    """AUC as a percentage with one decimal, rounded half-up (0.9735 -> '97.4')."""
    percent = Decimal(repr(float(value))) * 100
    return str(percent.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def format_decidability(report_or_value) -> str:
    """Two decimals rounded half-up; 'inf' for unbounded separation."""
    if isinstance(report_or_value, VerificationReport):
        if report_or_value.decidability_infinite:
            return "inf"
        report_or_value = report_or_value.decidability
    if math.isnan(report_or_value):
        return "n/a"
    if math.isinf(report_or_value):
        return "inf"
    return str(round_half_up(report_or_value, "0.01"))
