"""
Unit tests for verification metrics and reports.

Tests cover:
1. Decidability, AUC, ROC and EER on hand-computed examples
2. Cross checks between AUC and the ROC area
3. Report building, JSON/CSV files and display formatting

Run with: pytest tests/test_metrics.py -v
"""

import json
import math

import numpy as np
import pytest


def _scores(genuine, impostor):
    from periocular_eval.metrics import ScoreSet
    return ScoreSet(genuine, impostor)


def _grid_eer(genuine, impostor, step=1e-4):
    """Threshold scan: the (FAR + FRR) / 2 where |FAR - FRR| is smallest."""
    genuine, impostor = np.asarray(genuine), np.asarray(impostor)
    best, value = math.inf, None
    for t in np.arange(-step, 1.0 + 2 * step, step):
        far = np.mean(impostor >= t)
        frr = np.mean(genuine < t)
        if abs(far - frr) < best:
            best, value = abs(far - frr), (far + frr) / 2
    return value


class TestDecidability:
    """Tests for decidability."""

    def test_equal_distributions(self):
        """Identical score sets give 0."""
        from periocular_eval.metrics import decidability

        assert decidability(_scores([0.4, 0.6], [0.4, 0.6])) == 0.0

    def test_hand_computed(self):
        """{0.8, 0.9} vs {0.1, 0.2} gives 0.7 / sqrt(0.005)."""
        from periocular_eval.metrics import decidability

        assert decidability(_scores([0.8, 0.9], [0.1, 0.2])) == pytest.approx(9.89949, abs=1e-5)

    def test_zero_variance(self):
        """Constant but different sides flag infinite separation."""
        from periocular_eval.metrics import DegenerateDistributionError, decidability

        with pytest.raises(DegenerateDistributionError) as info:
            decidability(_scores([1.0, 1.0], [0.0, 0.0]))
        assert info.value.infinite is True

        with pytest.raises(DegenerateDistributionError) as info:
            decidability(_scores([0.5, 0.5], [0.5, 0.5]))
        assert info.value.infinite is False

    def test_matches_direct_formula(self, rng):
        """Random sets agree with a direct evaluation of the formula."""
        from periocular_eval.metrics import decidability

        for _ in range(1000):
            genuine = rng.normal(0.7, 0.1, rng.integers(2, 200))
            impostor = rng.normal(0.4, 0.1, rng.integers(2, 200))
            direct = abs(genuine.mean() - impostor.mean()) / math.sqrt((np.var(genuine, ddof=1) + np.var(impostor, ddof=1)) / 2)
            assert decidability(_scores(genuine, impostor)) == pytest.approx(direct, abs=1e-12)

    def test_symmetric_under_swap(self, rng):
        """Swapping genuine and impostor leaves d' unchanged."""
        from periocular_eval.metrics import decidability

        s = _scores(rng.random(50), rng.random(70))
        assert decidability(s) == decidability(s.swapped())

    def test_needs_two_scores(self):
        """A single score per side has no sample variance."""
        from periocular_eval.metrics import MetricsError, decidability

        with pytest.raises(MetricsError):
            decidability(_scores([0.9], [0.1, 0.2]))


class TestAuc:
    """Tests for auc."""

    def test_examples(self):
        """Perfect separation, identical sets and the 3/4 example."""
        from periocular_eval.metrics import auc

        assert auc(_scores([0.8, 0.9], [0.1, 0.2])) == 1.0
        assert auc(_scores([0.1, 0.5, 0.5], [0.5, 0.1, 0.5])) == pytest.approx(0.5, abs=1e-12)
        assert auc(_scores([0.9, 0.4], [0.5, 0.1])) == 0.75

    def test_swap_complement(self, rng):
        """auc(swapped) == 1 - auc."""
        from periocular_eval.metrics import auc

        s = _scores(np.round(rng.random(40), 2), np.round(rng.random(30), 2))
        assert auc(s.swapped()) == pytest.approx(1.0 - auc(s), abs=1e-12)

    def test_monotone_transform_invariance(self, rng):
        """A strictly increasing transform leaves the AUC exactly unchanged."""
        from periocular_eval.metrics import auc

        genuine, impostor = rng.random(200), rng.random(300)
        transform = lambda x: x ** 3 + 2 * x
        assert auc(_scores(transform(genuine), transform(impostor))) == auc(_scores(genuine, impostor))

    def test_roc_points_rank_invariant(self, rng):
        """The ROC point set depends only on the score ranks."""
        from periocular_eval.metrics import roc_curve

        for _ in range(100):
            genuine = np.round(rng.random(rng.integers(2, 50)), 2)
            impostor = np.round(rng.random(rng.integers(2, 50)), 2)
            before = roc_curve(_scores(genuine, impostor)).points()
            after = roc_curve(_scores(genuine ** 3 + 2 * genuine, impostor ** 3 + 2 * impostor)).points()
            assert before == after

    def test_empty_side(self):
        """Both sides are required."""
        from periocular_eval.metrics import MetricsError, auc

        with pytest.raises(MetricsError):
            auc(_scores([], [0.1]))

    def test_large_scale(self, rng):
        """6.3 million scores are handled in one pass."""
        from periocular_eval.metrics import auc, roc_curve

        genuine = rng.normal(1.0, 1.0, 63_000)
        impostor = rng.normal(0.0, 1.0, 6_237_000)
        s = _scores(genuine, impostor)
        value = auc(s)
        # Phi(1 / sqrt(2))
        assert value == pytest.approx(0.7602, abs=0.005)
        assert roc_curve(s).area() == pytest.approx(value, abs=1e-9)


class TestRocCurve:
    """Tests for roc_curve and eer."""

    def test_single_pair(self):
        """One genuine {1} and one impostor {0}."""
        from periocular_eval.metrics import roc_curve

        roc = roc_curve(_scores([1.0], [0.0]))
        assert roc.points() == [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        assert roc.thresholds[0] == math.inf

    def test_perfect_separation(self):
        """The curve passes through (0, 1)."""
        from periocular_eval.metrics import roc_curve

        assert (0.0, 1.0) in roc_curve(_scores([0.7, 0.8, 0.9], [0.1, 0.3])).points()

    def test_area_matches_auc_on_random_sets(self, rng):
        """Trapezoidal area equals the Mann-Whitney AUC on 1,000 random sets."""
        from periocular_eval.metrics import auc, roc_curve

        for _ in range(1000):
            n_g, n_i = rng.integers(1, 20, size=2)
            # coarse rounding produces ties
            s = _scores(np.round(rng.random(n_g), 1), np.round(rng.random(n_i), 1))
            assert roc_curve(s).area() == pytest.approx(auc(s), abs=1e-9)

    def test_monotone(self, rng):
        """FAR and TAR never decrease along the curve."""
        from periocular_eval.metrics import roc_curve

        roc = roc_curve(_scores(rng.random(100), rng.random(100)))
        assert np.all(np.diff(roc.far) >= 0) and np.all(np.diff(roc.tar) >= 0)
        assert roc.points()[-1] == (1.0, 1.0)

    def test_eer_examples(self):
        """Perfect separation gives 0 and identical sets give 0.5."""
        from periocular_eval.metrics import eer

        assert eer(_scores([0.8, 0.9], [0.1, 0.2])) == 0.0
        assert eer(_scores([0.1, 0.2, 0.3], [0.1, 0.2, 0.3])) == pytest.approx(0.5)

    def test_eer_matches_threshold_scan(self):
        """{0.9, 0.4} vs {0.5, 0.1} agrees with a dense threshold scan."""
        from periocular_eval.metrics import eer

        genuine, impostor = [0.9, 0.4], [0.5, 0.1]
        assert eer(_scores(genuine, impostor)) == pytest.approx(_grid_eer(genuine, impostor), abs=1e-4)
        assert eer(_scores(genuine, impostor)) == 0.5


class TestReports:
    """Tests for VerificationReport and its files."""

    def _records(self, genuine, impostor):
        from periocular_eval.matching import ScoreRecord

        records = [ScoreRecord(f"g{i}", f"h{i}", "genuine", {"m": s}) for i, s in enumerate(genuine)]
        records += [ScoreRecord(f"i{i}", f"j{i}", "impostor", {"m": s}) for i, s in enumerate(impostor)]
        return records

    def test_perfect_matcher(self):
        """A perfectly separating matcher has AUC 1 and EER 0."""
        from periocular_eval.metrics import build_report

        report = build_report(self._records([0.8, 0.9, 0.95], [0.1, 0.2]), "m", "original")
        assert report.auc == 1.0
        assert report.eer == 0.0
        assert report.counts == (3, 2)
        assert report.variant == "original"
        assert report.decidability > 0

    def test_counts_follow_pairs(self, two_class_manifest):
        """Report counts equal the pair list's label counts."""
        from periocular_eval.data import generate_pairs
        from periocular_eval.matching import ScoreRecord
        from periocular_eval.metrics import build_report

        pairs = generate_pairs(two_class_manifest)
        records = [ScoreRecord(p.sample_id_a, p.sample_id_b, p.label, {"m": 0.1 * i}) for i, p in enumerate(pairs)]
        assert build_report(records, "m", "original").counts == pairs.counts()

    def test_missing_label(self):
        """Records of only one label cannot be evaluated."""
        from periocular_eval.metrics import MetricsError, build_report

        with pytest.raises(MetricsError, match="impostor"):
            build_report(self._records([0.5, 0.6], []), "m", "original")

    def test_infinite_decidability_json(self, tmp_path):
        """Degenerate separation is written as null plus a flag, never Infinity."""
        from periocular_eval.metrics import build_report, load_report, save_report

        report = build_report(self._records([1.0, 1.0], [0.0, 0.0]), "m", "normalized")
        assert report.decidability_infinite
        assert math.isinf(report.decidability)

        path = save_report(report, tmp_path / "m.json")
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["decidability"] is None
        assert data["decidability_infinite"] is True
        assert "Infinity" not in path.read_text(encoding="utf-8")
        assert load_report(path) == report

    def test_json_round_trip(self, tmp_path, rng):
        """Reports reload to equal objects."""
        from periocular_eval.metrics import build_report, load_report, save_report

        report = build_report(self._records(rng.random(20) + 0.3, rng.random(30)), "m", "original")
        assert load_report(save_report(report, tmp_path / "r.json")) == report

    def test_roc_csv(self, tmp_path, rng):
        """ROC CSV keeps thresholds, FAR and TAR exactly."""
        from periocular_eval.metrics import load_roc_csv, roc_curve, save_roc_csv

        roc = roc_curve(_scores(rng.random(15), rng.random(15)))
        path = save_roc_csv(roc, tmp_path / "roc.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == "threshold,far,tar"
        loaded = load_roc_csv(path)
        np.testing.assert_array_equal(loaded.thresholds, roc.thresholds)
        np.testing.assert_array_equal(loaded.far, roc.far)
        np.testing.assert_array_equal(loaded.tar, roc.tar)

    def test_display_rounding(self):
        """AUC percent and decidability round half-up."""
        from periocular_eval.metrics import format_auc_percent, format_decidability

        assert format_auc_percent(0.9735) == "97.4"
        assert format_auc_percent(1.0) == "100.0"
        assert format_decidability(1.4261) == "1.43"
        assert format_decidability(0.125) == "0.13"
        assert format_decidability(math.inf) == "inf"
