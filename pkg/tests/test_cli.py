"""
Tests for the command-line interface.

Tests cover:
1. The stage-by-stage file workflow (synthetic, validate, split, pairs, match, fuse, evaluate, compare)
2. Stage-tagged errors and exit codes

Run with: pytest tests/test_cli.py -v
"""

import json

import pytest


@pytest.fixture
def dataset(tmp_path):
    """A tiny synthetic dataset written through the CLI."""
    from periocular_eval.cli import main

    root = tmp_path / "data"
    assert main(["--seed", "5", "synthetic", str(root), "--classes", "3", "--per-class", "3", "--size", "96"]) == 0
    return root / "manifest.csv"


def _globals(tmp_path, out="out"):
    return ["--out-dir", str(tmp_path / out), "--cache-dir", str(tmp_path / "cache"), "--workers", "1"]


class TestStages:
    """Tests for individual subcommands."""

    def test_validate(self, dataset, capsys):
        """validate prints sample, subject and class counts."""
        from periocular_eval.cli import main

        assert main(["validate", str(dataset)]) == 0
        assert "9 samples, 3 subjects, 3 classes" in capsys.readouterr().out

    def test_split(self, dataset, tmp_path):
        """split writes disjoint train and eval manifests."""
        from periocular_eval.cli import main
        from periocular_eval.data import load_manifest

        assert main(_globals(tmp_path) + ["split", str(dataset), "--fraction", "0.34"]) == 0
        train = load_manifest(tmp_path / "out" / "split" / "train.csv")
        eval_m = load_manifest(tmp_path / "out" / "split" / "eval.csv")
        assert len(train.subjects) == 2
        assert len(eval_m.subjects) == 1
        assert set(train.subjects).isdisjoint(eval_m.subjects)

    def test_pairs(self, dataset, tmp_path, capsys):
        """pairs reports the label counts."""
        from periocular_eval.cli import main

        assert main(_globals(tmp_path) + ["pairs", str(dataset)]) == 0
        assert "36 pairs (9 genuine, 27 impostor)" in capsys.readouterr().out
        assert (tmp_path / "out" / "pairs.csv").is_file()

    def test_pairs_attribute_filter(self, dataset, tmp_path, capsys):
        """The eyeglasses filter drops genuine and impostor pairs alike."""
        from periocular_eval.cli import main

        assert main(_globals(tmp_path) + ["pairs", str(dataset), "--attribute-differing"]) == 0
        assert "18 pairs (6 genuine, 12 impostor)" in capsys.readouterr().out

        with pytest.raises(SystemExit):
            main(["pairs", "--help"])
        help_text = " ".join(capsys.readouterr().out.split())
        assert "genuine and impostor" in help_text

    def test_normalize_identity(self, dataset, tmp_path):
        """normalize with the identity command writes a normalized manifest."""
        from periocular_eval.cli import main
        from periocular_eval.data import Variant, load_manifest

        assert main(_globals(tmp_path) + ["normalize", str(dataset), "--cmd", "identity"]) == 0
        normalized = load_manifest(tmp_path / "out" / "normalized" / "manifest.csv")
        assert all(r.variant is Variant.NORMALIZED for r in normalized)

    def test_file_workflow(self, dataset, tmp_path, capsys):
        """pairs -> match -> fuse -> evaluate -> compare, each through files."""
        from periocular_eval.cli import main

        out = tmp_path / "out"
        assert main(_globals(tmp_path) + ["pairs", str(dataset)]) == 0
        assert main(_globals(tmp_path) + ["match", str(dataset), "--pairs", str(out / "pairs.csv"),
                                          "--preset", "ahmed"]) == 0
        assert main(_globals(tmp_path) + ["fuse", "--scores", str(out / "scores_long.csv")]) == 0
        assert main(_globals(tmp_path) + ["evaluate", "--scores", str(out / "scores_long.csv"),
                                          str(out / "fused.csv")]) == 0
        assert (out / "reports" / "mbtlbp-3x3.json").is_file()
        assert (out / "reports" / "fused.json").is_file()
        assert (out / "roc" / "fused.csv").is_file()

        capsys.readouterr()
        assert main(_globals(tmp_path, "cmp") + ["compare", str(out), str(out)]) == 0
        assert "| mbtlbp-3x3 |" in capsys.readouterr().out
        data = json.loads((tmp_path / "cmp" / "comparison.json").read_text(encoding="utf-8"))
        assert {c["matcher_id"] for c in data["comparisons"]} == {"fused", "mbtlbp-3x3"}

    def test_run(self, dataset, tmp_path, capsys):
        """run executes the whole pipeline and prints the comparison table."""
        from periocular_eval.cli import main

        code = main(_globals(tmp_path) + ["run", "--manifest", str(dataset), "--preset", "ahmed", "--cmd", "identity"])
        assert code == 0
        output = capsys.readouterr().out
        assert "Decidability change" in output
        assert (tmp_path / "out" / "comparison.json").is_file()

    def test_run_with_config_file(self, dataset, tmp_path):
        """run reads a JSON config; flags left unset keep the file's values."""
        from periocular_eval.cli import main

        config = tmp_path / "exp.json"
        config.write_text(json.dumps({
            "manifest_path": str(dataset),
            "preset": "ahmed",
            "variant_under_test": "original",
        }), encoding="utf-8")
        assert main(_globals(tmp_path) + ["run", "--config", str(config)]) == 0
        saved = json.loads((tmp_path / "out" / "config.json").read_text(encoding="utf-8"))
        assert saved["preset"] == "ahmed"
        assert saved["workers"] == 1


class TestErrors:
    """Tests for failure reporting."""

    def test_missing_manifest(self, tmp_path, capsys):
        """A missing manifest exits 1 with the stage in the message."""
        from periocular_eval.cli import main

        assert main(["validate", str(tmp_path / "absent.csv")]) == 1
        assert capsys.readouterr().err.startswith("error [validate]:")

    def test_bad_weights(self, dataset, tmp_path, capsys):
        """A weight count that does not match the matchers fails in fuse."""
        from periocular_eval.cli import main

        out = tmp_path / "out"
        main(_globals(tmp_path) + ["pairs", str(dataset)])
        main(_globals(tmp_path) + ["match", str(dataset), "--pairs", str(out / "pairs.csv"), "--preset", "ahmed"])
        capsys.readouterr()
        assert main(_globals(tmp_path) + ["fuse", "--scores", str(out / "scores_long.csv"),
                                          "--weights", "0.5", "0.5"]) == 1
        assert "error [fuse]:" in capsys.readouterr().err

    def test_run_failure_names_stage(self, dataset, tmp_path, capsys):
        """A failing normalizer command is reported by run with its stage."""
        from periocular_eval.cli import main

        code = main(_globals(tmp_path) + ["run", "--manifest", str(dataset), "--preset", "ahmed",
                                          "--cmd", "no-such-editor-xyz {in_dir} {out_dir}"])
        assert code == 1
        assert "error [normalize]:" in capsys.readouterr().err

    def test_unknown_preset_rejected_by_parser(self):
        """argparse rejects unknown presets before any work."""
        from periocular_eval.cli import main

        with pytest.raises(SystemExit):
            main(["extract", "m.csv", "--preset", "nope"])
