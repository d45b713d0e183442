"""
Unit tests for original-versus-normalized report comparison.

Tests cover:
1. Relative deltas and their percent labels
2. Aggregating repeated runs
3. Markdown tables and the comparison payload

Run with: pytest tests/test_compare.py -v
"""

import json
import math

import numpy as np
import pytest


def _report(matcher_id="lbp", variant="original", auc=0.9, decidability=1.5, eer=0.1):
    from periocular_eval.metrics import RocCurve, VerificationReport

    roc = RocCurve(np.array([np.inf, 0.5, 0.1]), np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.9, 1.0]))
    return VerificationReport(
        matcher_id=matcher_id,
        variant=variant,
        auc=auc,
        decidability=decidability,
        decidability_infinite=math.isinf(decidability),
        eer=eer,
        roc=roc,
        n_genuine=10,
        n_impostor=40,
        genuine_mean=0.8,
        genuine_std=0.1,
        impostor_mean=0.4,
        impostor_std=0.1,
    )


class TestCompareReports:
    """Tests for compare_reports and percent_label."""

    @pytest.mark.parametrize("original,normalized,label", [
        (1.1093, 1.4261, "+28%"),
        (0.9206, 1.5764, "+71%"),
        (1.5, 1.2, "-20%"),
    ])
    def test_decidability_change(self, original, normalized, label):
        """Relative change is truncated to a whole percent."""
        from periocular_eval.pipeline import compare_reports

        comparison = compare_reports(_report(decidability=original), _report(variant="normalized", decidability=normalized))
        assert comparison.decidability_change == label
        assert comparison.decidability_rel_delta == pytest.approx(normalized / original - 1)

    def test_identical_reports(self):
        """Comparing a report with itself gives zero deltas."""
        from periocular_eval.pipeline import compare_reports

        comparison = compare_reports(_report(), _report())
        assert comparison.auc_abs_delta == 0.0
        assert comparison.auc_rel_delta == 0.0
        assert comparison.decidability_abs_delta == 0.0
        assert comparison.decidability_change == "0%"

    def test_different_matchers(self):
        """Reports of different matchers cannot be compared."""
        from periocular_eval.metrics import MetricsError
        from periocular_eval.pipeline import compare_reports

        with pytest.raises(MetricsError):
            compare_reports(_report(matcher_id="lbp"), _report(matcher_id="hog"))

    def test_unbounded_decidability(self):
        """An infinite side has no relative change."""
        from periocular_eval.pipeline import compare_reports

        comparison = compare_reports(_report(decidability=2.0), _report(decidability=math.inf))
        assert comparison.decidability_rel_delta is None
        assert comparison.decidability_abs_delta is None
        assert comparison.decidability_change == "n/a"
        assert comparison.to_dict()["decidability_b"] is None

    def test_zero_baseline(self):
        """A zero baseline has no relative change."""
        from periocular_eval.pipeline.compare import relative_delta

        assert relative_delta(0.0, 1.0) is None
        assert relative_delta(2.0, 3.0) == 0.5


class TestAggregateReports:
    """Tests for aggregate_reports and compare_report_sets."""

    def test_mean_and_sample_std(self):
        """Mean and n-1 standard deviation over runs."""
        from periocular_eval.pipeline import aggregate_reports

        reports = [_report(matcher_id=f"deep-256-r{k}", auc=a) for k, a in enumerate([0.90, 0.92, 0.94])]
        aggregate = aggregate_reports(reports, matcher_id="deep-256")
        assert aggregate.matcher_id == "deep-256"
        assert aggregate.runs == 3
        assert aggregate.auc_mean == pytest.approx(0.92)
        assert aggregate.auc_std == pytest.approx(0.02)
        assert aggregate.decidability_std == 0.0

    def test_mixed_variants(self):
        """All runs must share a variant."""
        from periocular_eval.metrics import MetricsError
        from periocular_eval.pipeline import aggregate_reports

        with pytest.raises(MetricsError):
            aggregate_reports([_report(), _report(variant="normalized")])

    def test_set_comparison(self):
        """Set comparison works on the run means."""
        from periocular_eval.pipeline import compare_report_sets

        a = [_report(decidability=d) for d in (1.0, 1.2)]
        b = [_report(variant="normalized", decidability=d) for d in (1.5, 1.7)]
        comparison = compare_report_sets(a, b, matcher_id="deep-256")
        assert comparison.decidability_rel_delta == pytest.approx(1.6 / 1.1 - 1)
        assert comparison.to_dict()["decidability_change"] == "+45%"


class TestRendering:
    """Tests for tables and payload files."""

    def test_comparison_table(self):
        """One row per matcher with rounded values."""
        from periocular_eval.pipeline import compare_reports, render_comparison_table

        comparison = compare_reports(
            _report(auc=0.9735, decidability=1.1093),
            _report(variant="normalized", auc=0.98, decidability=1.4261),
        )
        table = render_comparison_table([comparison])
        lines = table.strip().splitlines()
        assert len(lines) == 3
        assert lines[2] == "| lbp | 97.4 | 98.0 | 1.11 | 1.43 | +28% |"

    def test_payload_is_strict_json(self, tmp_path):
        """The saved payload has no Infinity or NaN tokens."""
        from periocular_eval.pipeline import compare_reports, comparisons_payload, save_comparison

        a, b = _report(), _report(variant="normalized", decidability=math.inf)
        path = save_comparison(comparisons_payload([compare_reports(a, b)], [a, b]), tmp_path / "comparison.json")
        text = path.read_text(encoding="utf-8")
        assert "Infinity" not in text and "NaN" not in text
        data = json.loads(text)
        assert data["reports"][1]["decidability_infinite"] is True
