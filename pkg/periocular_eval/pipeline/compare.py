"""
Original-versus-normalized comparison of verification reports.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..metrics import MetricsError, VerificationReport, format_auc_percent, format_decidability
from ..metrics.report import round_half_up

logger = logging.getLogger(__name__)


def relative_delta(a: float, b: float) -> Optional[float]:
    """b / a - 1; None when a is zero or either side is unbounded."""
    if a == 0 or math.isinf(a) or math.isinf(b):
        return None
    return b / a - 1.0


def percent_label(rel: Optional[float]) -> str:
    """Integer percent truncated toward zero: 0.2856 -> '+28%'."""
    if rel is None:
        return "n/a"
    # tolerance keeps 0.29 (stored as 0.28999...) at 29
    whole = int(math.floor(abs(rel) * 100 + 1e-9))
    if whole == 0:
        return "0%"
    return f"{'+' if rel > 0 else '-'}{whole}%"


@dataclass(frozen=True)
class ReportComparison:
    """Deltas from report a (usually original) to report b (usually normalized)."""
    matcher_id: str
    variant_a: str
    variant_b: str
    auc_a: float
    auc_b: float
    auc_abs_delta: float
    auc_rel_delta: Optional[float]
    decidability_a: float
    decidability_b: float
    decidability_abs_delta: Optional[float]
    decidability_rel_delta: Optional[float]

    @property
    def decidability_change(self) -> str:
        return percent_label(self.decidability_rel_delta)

    @property
    def auc_change(self) -> str:
        return percent_label(self.auc_rel_delta)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for name in ("decidability_a", "decidability_b"):
            if math.isinf(data[name]):
                data[name] = None
        data["decidability_change"] = self.decidability_change
        data["auc_change"] = self.auc_change
        return data


def compare_reports(a: VerificationReport, b: VerificationReport) -> ReportComparison:
    """
    Absolute and relative deltas of AUC and decidability.

    Raises:
        MetricsError: the reports belong to different matchers
    """
    if a.matcher_id != b.matcher_id:
        raise MetricsError(f"cannot compare matcher '{a.matcher_id}' with '{b.matcher_id}'")
    finite = not (math.isinf(a.decidability) or math.isinf(b.decidability))
    return ReportComparison(
        matcher_id=a.matcher_id,
        variant_a=a.variant,
        variant_b=b.variant,
        auc_a=a.auc,
        auc_b=b.auc,
        auc_abs_delta=b.auc - a.auc,
        auc_rel_delta=relative_delta(a.auc, b.auc),
        decidability_a=a.decidability,
        decidability_b=b.decidability,
        decidability_abs_delta=(b.decidability - a.decidability) if finite else None,
        decidability_rel_delta=relative_delta(a.decidability, b.decidability),
    )


@dataclass(frozen=True)
class ReportAggregate:
    """Mean and sample standard deviation of metrics over repeated runs."""
    matcher_id: str
    variant: str
    runs: int
    auc_mean: float
    auc_std: float
    decidability_mean: float
    decidability_std: float
    eer_mean: float
    eer_std: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _mean_std(values: Sequence[float]):
    arr = np.asarray(values, dtype=np.float64)
    if np.isinf(arr).any():
        return math.inf, math.nan
    return float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0


def aggregate_reports(reports: Sequence[VerificationReport], matcher_id: Optional[str] = None) -> ReportAggregate:
    """
    Summarize repeated runs (one report per run) of one matcher on one variant.

    Parameters:
    - reports: run reports sharing a variant
    - matcher_id: name of the aggregate (defaults to the first report's)
    """
    if not reports:
        raise MetricsError("no reports to aggregate")
    variants = {r.variant for r in reports}
    if len(variants) > 1:
        raise MetricsError(f"cannot aggregate reports of different variants: {sorted(variants)}")
    auc_mean, auc_std = _mean_std([r.auc for r in reports])
    dec_mean, dec_std = _mean_std([r.decidability for r in reports])
    eer_mean, eer_std = _mean_std([r.eer for r in reports])
    return ReportAggregate(
        matcher_id=matcher_id or reports[0].matcher_id,
        variant=reports[0].variant,
        runs=len(reports),
        auc_mean=auc_mean,
        auc_std=auc_std,
        decidability_mean=dec_mean,
        decidability_std=dec_std,
        eer_mean=eer_mean,
        eer_std=eer_std,
    )


@dataclass(frozen=True)
class SetComparison:
    a: ReportAggregate
    b: ReportAggregate
    auc_rel_delta: Optional[float]
    decidability_rel_delta: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a.to_dict(),
            "b": self.b.to_dict(),
            "auc_rel_delta": self.auc_rel_delta,
            "decidability_rel_delta": self.decidability_rel_delta,
            "decidability_change": percent_label(self.decidability_rel_delta),
        }


def compare_report_sets(
    a_reports: Sequence[VerificationReport],
    b_reports: Sequence[VerificationReport],
    matcher_id: Optional[str] = None,
) -> SetComparison:
    """Compare the run means of two report sets (e.g. five deep runs per variant)."""
    a = aggregate_reports(a_reports, matcher_id)
    b = aggregate_reports(b_reports, matcher_id)
    return SetComparison(
        a=a,
        b=b,
        auc_rel_delta=relative_delta(a.auc_mean, b.auc_mean),
        decidability_rel_delta=relative_delta(a.decidability_mean, b.decidability_mean),
    )


def render_comparison_table(comparisons: Sequence[ReportComparison]) -> str:
    """
    Markdown table with one row per method and original/normalized columns.

    AUC is shown in percent with one decimal and decidability with two,
    both rounded half-up.
    """
    lines = [
        "| Method | AUC (%) original | AUC (%) normalized | Decidability original | Decidability normalized | Decidability change |",
        "|---|---|---|---|---|---|",
    ]
    for c in comparisons:
        lines.append(
            f"| {c.matcher_id} | {format_auc_percent(c.auc_a)} | {format_auc_percent(c.auc_b)} "
            f"| {format_decidability(c.decidability_a)} | {format_decidability(c.decidability_b)} "
            f"| {c.decidability_change} |"
        )
    return "\n".join(lines) + "\n"


def render_report_table(reports: Sequence[VerificationReport]) -> str:
    """Markdown table for runs that evaluate a single variant."""
    lines = [
        "| Method | Variant | AUC (%) | Decidability | EER |",
        "|---|---|---|---|---|",
    ]
    for r in reports:
        lines.append(
            f"| {r.matcher_id} | {r.variant} | {format_auc_percent(r.auc)} "
            f"| {format_decidability(r)} | {round_half_up(r.eer, '0.0001')} |"
        )
    return "\n".join(lines) + "\n"


def render_aggregate_table(aggregates: Sequence[ReportAggregate]) -> str:
    lines = [
        "| Method | Variant | Runs | AUC (%) mean ± std | Decidability mean ± std |",
        "|---|---|---|---|---|",
    ]
    for a in aggregates:
        lines.append(
            f"| {a.matcher_id} | {a.variant} | {a.runs} "
            f"| {format_auc_percent(a.auc_mean)} ± {format_auc_percent(a.auc_std)} "
            f"| {format_decidability(a.decidability_mean)} ± {format_decidability(a.decidability_std)} |"
        )
    return "\n".join(lines) + "\n"


def save_comparison(payload: Dict[str, Any], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def comparisons_payload(
    comparisons: Sequence[ReportComparison],
    reports: Sequence[VerificationReport],
    set_comparisons: Sequence[SetComparison] = (),
) -> Dict[str, Any]:
    def summary(r: VerificationReport) -> Dict[str, Any]:
        return {
            "matcher_id": r.matcher_id,
            "variant": r.variant,
            "auc": r.auc,
            "auc_percent": format_auc_percent(r.auc),
            "decidability": None if math.isinf(r.decidability) else r.decidability,
            "decidability_infinite": r.decidability_infinite,
            "eer": r.eer,
        }

    return {
        "reports": [summary(r) for r in reports],
        "comparisons": [c.to_dict() for c in comparisons],
        "run_sets": [_finite(s.to_dict()) for s in set_comparisons],
    }


def _finite(data):
    if isinstance(data, dict):
        return {k: _finite(v) for k, v in data.items()}
    if isinstance(data, float) and not math.isfinite(data):
        return None
    return data
