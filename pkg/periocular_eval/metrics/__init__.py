"""
Metrics module: decidability, AUC, ROC, EER and verification reports.
"""

from .verification import (
    DegenerateDistributionError,
    MetricsError,
    RocCurve,
    ScoreSet,
    auc,
    decidability,
    eer,
    roc_curve,
)
from .report import (
    VerificationReport,
    build_report,
    format_auc_percent,
    format_decidability,
    load_report,
    load_roc_csv,
    report_from_scores,
    report_from_table,
    save_report,
    save_roc_csv,
)

__all__ = [
    "DegenerateDistributionError",
    "MetricsError",
    "RocCurve",
    "ScoreSet",
    "auc",
    "decidability",
    "eer",
    "roc_curve",
    "VerificationReport",
    "build_report",
    "format_auc_percent",
    "format_decidability",
    "load_report",
    "load_roc_csv",
    "report_from_scores",
    "report_from_table",
    "save_report",
    "save_roc_csv",
]
