"""
End-to-end tests for run_experiment on synthetic data.

Tests cover:
1. Identity normalization leaves every report unchanged
2. Reruns write byte-identical artifacts
3. Noisy-copy classes are separated by the fused matcher
4. Flat images, deep embeddings and stage-tagged failures
5. Pair counts on the real datasets (skipped unless configured)

Run with: pytest tests/test_pipeline.py -v
"""

from pathlib import Path

import numpy as np
import pytest

# artifacts that legitimately embed the run's own paths
PATH_BEARING = {"config.json", "normalized/manifest.csv"}


def _config(manifest_path, root, **overrides):
    from periocular_eval.utils.config import ExperimentConfig

    settings = dict(
        manifest_path=str(manifest_path),
        normalizer_command="identity",
        cache_dir=str(root / "cache"),
        out_dir=str(root / "out"),
        workers=2,
        crop_size=128,
        hog_size=64,
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


def _files(out_dir: Path):
    return {
        p.relative_to(out_dir).as_posix(): p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file() and p.relative_to(out_dir).as_posix() not in PATH_BEARING
    }


class TestIdentityRun:
    """Tests for a full run with the identity normalizer."""

    def test_variants_report_equal(self, synthetic_manifest, tmp_path):
        """Original and identity-normalized reports agree to full precision."""
        from periocular_eval.pipeline import run_experiment

        run = run_experiment(_config(synthetic_manifest, tmp_path))
        matchers = ["lbp-u2-8-1", "lpq-7", "hog-64", "sift", "fused"]
        assert sorted({m for m, _ in run.reports}) == sorted(matchers)

        for matcher_id in matchers:
            original = run.report(matcher_id, "original")
            normalized = run.report(matcher_id, "normalized")
            assert original.auc == normalized.auc
            assert original.decidability == normalized.decidability
            assert original.eer == normalized.eer
            assert original.roc.points() == normalized.roc.points()
            assert original.counts == normalized.counts

        assert all(c.decidability_change == "0%" for c in run.comparisons)
        assert run.table_path.read_text(encoding="utf-8").startswith("| Method |")

    def test_artifact_layout(self, synthetic_manifest, tmp_path):
        """Each variant writes pairs, scores, fused scores, reports and ROC files."""
        from periocular_eval.pipeline import run_experiment

        run = run_experiment(_config(synthetic_manifest, tmp_path, variant_under_test="original", plots=True))
        out = tmp_path / "out"
        for name in ["config.json", "comparison.json", "comparison.md", "original/pairs.csv",
                     "original/scores_long.csv", "original/fused.csv", "original/reports/fused.json",
                     "original/roc/sift.csv", "original/plots/roc.svg", "original/plots/lpq-7_scores.svg"]:
            assert (out / name).is_file(), name
        assert run.comparisons == []
        assert run.variants["original"].fused_path == out / "original" / "fused.csv"

    def test_reruns_are_byte_identical(self, synthetic_manifest, tmp_path):
        """Two runs into different directories write identical files."""
        from periocular_eval.pipeline import run_experiment

        first = run_experiment(_config(synthetic_manifest, tmp_path / "a", plots=True))
        second = run_experiment(_config(synthetic_manifest, tmp_path / "b", plots=True))
        assert second.cache_stats["hits"] == 0

        a, b = _files(first.out_dir), _files(second.out_dir)
        assert sorted(a) == sorted(b)
        for name in a:
            assert a[name] == b[name], name

    def test_warm_cache_run(self, synthetic_manifest, tmp_path):
        """A rerun on a warm cache writes the same scores."""
        from periocular_eval.pipeline import run_experiment

        cold = run_experiment(_config(synthetic_manifest, tmp_path, out_dir=str(tmp_path / "cold")))
        warm = run_experiment(_config(synthetic_manifest, tmp_path, out_dir=str(tmp_path / "warm")))
        assert warm.cache_stats["misses"] == 0
        assert (cold.variants["original"].scores_path.read_bytes()
                == warm.variants["original"].scores_path.read_bytes())

    def test_split_evaluates_held_out_subjects(self, synthetic_manifest, tmp_path):
        """With a split fraction only eval subjects are paired."""
        from periocular_eval.data import load_manifest, load_pairs
        from periocular_eval.pipeline import run_experiment

        run = run_experiment(_config(synthetic_manifest, tmp_path, split_fraction=0.5, variant_under_test="original"))
        eval_m = load_manifest(tmp_path / "out" / "split" / "eval.csv")
        train_m = load_manifest(tmp_path / "out" / "split" / "train.csv")
        assert set(eval_m.subjects).isdisjoint(train_m.subjects)

        pairs = load_pairs(run.variants["original"].pairs_path)
        assert set(pairs.sample_id_a) | set(pairs.sample_id_b) <= {r.sample_id for r in eval_m}


class TestSeparability:
    """Tests on noisy copies of class textures."""

    def test_fused_matcher_separates_classes(self, tmp_path):
        """10 classes x 6 noisy copies: fused AUC > 0.95 and decidability > 2."""
        from periocular_eval.pipeline import make_synthetic_dataset, run_experiment

        manifest = make_synthetic_dataset(tmp_path / "data", classes=10, per_class=6, noise=0.05, size=128)
        run = run_experiment(_config(manifest, tmp_path, variant_under_test="original", hog_size=368, workers=4))
        fused = run.report("fused", "original")
        assert fused.counts == (10 * 15, 60 * 59 // 2 - 10 * 15)
        assert fused.auc > 0.95
        assert fused.decidability > 2

    def test_flat_classes_do_not_crash(self, tmp_path):
        """Flat images give empty SIFT sets and zero HOG vectors without failing."""
        from periocular_eval.pipeline import make_synthetic_dataset, run_experiment

        manifest = make_synthetic_dataset(tmp_path / "data", classes=3, per_class=3, size=128, constant_classes=2)
        run = run_experiment(_config(manifest, tmp_path, variant_under_test="original"))

        sift = run.report("sift", "original")
        assert 0.0 <= sift.auc <= 1.0
        table = run.variants["original"].scores_path.read_text(encoding="utf-8")
        assert "subj003_0" in table


class TestDeepPreset:
    """Tests for precomputed embeddings."""

    def _write_embeddings(self, manifest_path, directory, seed):
        from periocular_eval.data import load_manifest
        from periocular_eval.features import save_embedding

        rng = np.random.default_rng(seed)
        m = load_manifest(manifest_path)
        centers = {c: rng.normal(size=256) for c in m.classes}
        for record in m:
            values = centers[record.class_id] + rng.normal(0.0, 0.3, 256)
            save_embedding(values, directory / f"{record.sample_id}.emb")

    def test_single_run(self, synthetic_manifest, tmp_path):
        """One embedding directory gives one deep-256 report and no fusion."""
        from periocular_eval.pipeline import run_experiment

        self._write_embeddings(synthetic_manifest, tmp_path / "emb", seed=1)
        run = run_experiment(_config(synthetic_manifest, tmp_path, preset="deep", variant_under_test="original",
                                     embedding_dirs=[str(tmp_path / "emb")]))
        assert list(run.reports) == [("deep-256", "original")]
        assert run.report("deep-256", "original").auc > 0.95

    def test_repeated_runs_are_aggregated(self, synthetic_manifest, tmp_path):
        """Several embedding directories are evaluated as separate runs and summarized."""
        from periocular_eval.pipeline import run_experiment

        templates = []
        for run_no in (1, 2):
            for variant in ("original", "normalized"):
                self._write_embeddings(synthetic_manifest, tmp_path / f"run{run_no}" / variant, seed=run_no)
            templates.append(str(tmp_path / f"run{run_no}" / "{variant}"))

        run = run_experiment(_config(synthetic_manifest, tmp_path, preset="deep", embedding_dirs=templates))
        assert ("deep-256-r1", "normalized") in run.reports
        assert ("deep-256-r2", "original") in run.reports
        assert len(run.set_comparisons) == 1
        assert run.set_comparisons[0].a.runs == 2
        assert "± " in run.table_path.read_text(encoding="utf-8")

    def test_wrong_dimension_fails_in_extract(self, synthetic_manifest, tmp_path):
        """A 128-d embedding stops the run in the extract stage."""
        from periocular_eval.data import load_manifest
        from periocular_eval.features import save_embedding
        from periocular_eval.pipeline import StageError, run_experiment

        for record in load_manifest(synthetic_manifest):
            save_embedding(np.ones(128), tmp_path / "emb" / f"{record.sample_id}.emb")
        with pytest.raises(StageError) as info:
            run_experiment(_config(synthetic_manifest, tmp_path, preset="deep", variant_under_test="original",
                                   embedding_dirs=[str(tmp_path / "emb")]))
        assert info.value.stage == "extract"


class TestFailures:
    """Tests for stage-tagged errors."""

    def test_missing_manifest(self, tmp_path):
        """A missing manifest fails in the validate stage."""
        from periocular_eval.pipeline import StageError, run_experiment

        with pytest.raises(StageError) as info:
            run_experiment(_config(tmp_path / "absent.csv", tmp_path))
        assert info.value.stage == "validate"

    def test_normalized_variant_needs_normalizer(self, synthetic_manifest, tmp_path):
        """Without a normalizer the config stage rejects the run."""
        from periocular_eval.pipeline import StageError, run_experiment

        with pytest.raises(StageError) as info:
            run_experiment(_config(synthetic_manifest, tmp_path, normalizer_command=None))
        assert info.value.stage == "config"

    def test_failing_normalizer(self, synthetic_manifest, tmp_path):
        """A normalizer that cannot start fails in the normalize stage."""
        from periocular_eval.pipeline import StageError, run_experiment

        with pytest.raises(StageError) as info:
            run_experiment(_config(synthetic_manifest, tmp_path,
                                   normalizer_command="no-such-editor-xyz {in_dir} {out_dir}"))
        assert info.value.stage == "normalize"


class TestRealDatasets:
    """Pair counts on the real datasets, when their manifests are available."""

    @pytest.mark.parametrize("variable,counts", [
        ("PERIOCULAR_UFPR_MANIFEST", (3072, 274464)),
        ("PERIOCULAR_UBIPR_MANIFEST", (22012, 6246232)),
    ])
    def test_pair_counts(self, real_manifest, variable, counts):
        """Unfiltered protocol counts match the published ones."""
        from periocular_eval.data import generate_pairs, load_manifest

        m = load_manifest(real_manifest(variable), check_paths=False)
        assert generate_pairs(m).counts() == counts
