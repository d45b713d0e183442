#!/usr/bin/env python3
"""
Command-line interface for periocular_eval.

Each pipeline stage is a subcommand that reads and writes plain files under
--out-dir, so stages can be run one by one or all at once with `run`.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from . import __version__
from .data import SubjectOrdering, Variant, generate_pairs, load_manifest, load_pairs, save_manifest, save_pairs, split_subjects
from .matching import FUSED, FusionConfig, fuse_table, load_fused, load_scores, matcher_columns, save_fused, save_scores
from .matching.io import FUSED_COLUMNS
from .metrics import load_report
from .normalizers import normalizer_for
from .pipeline import (
    PRESETS,
    FeatureCache,
    StageError,
    build_extractors,
    compare_reports,
    extract_all,
    load_embeddings,
    make_synthetic_dataset,
    match_pairs,
    render_comparison_table,
    run_experiment,
    stage,
    write_reports,
)
from .pipeline.compare import comparisons_payload, save_comparison
from .utils.config import INTENSITY_CHOICES, ORDERING_CHOICES, VARIANT_CHOICES, debug_enabled, load_config
from .utils.logging import setup_logging

logger = logging.getLogger(__name__)


def _config(args, **overrides):
    """ExperimentConfig from --config (if the subcommand has one) plus global and subcommand flags."""
    overrides.update({
        "cache_dir": args.cache_dir,
        "out_dir": args.out_dir,
        "seed": args.seed,
        "workers": args.workers,
    })
    return load_config(getattr(args, "config", None), overrides)


def _out_dir(args) -> Path:
    out_dir = Path(_config(args).out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def cmd_validate(args) -> int:
    with stage("validate"):
        m = load_manifest(args.manifest, check_paths=True)
    print(f"{args.manifest}: {len(m)} samples, {len(m.subjects)} subjects, {len(m.classes)} classes")
    return 0


def cmd_split(args) -> int:
    with stage("split"):
        out_dir = _out_dir(args)
        m = load_manifest(args.manifest)
        train, eval_m = split_subjects(m, args.fraction, SubjectOrdering(args.ordering))
        train_path = save_manifest(train, out_dir / "split" / "train.csv")
        eval_path = save_manifest(eval_m, out_dir / "split" / "eval.csv")
    print(f"train: {len(train)} samples -> {train_path}")
    print(f"eval: {len(eval_m)} samples -> {eval_path}")
    return 0


def cmd_normalize(args) -> int:
    with stage("normalize"):
        out_dir = _out_dir(args)
        m = load_manifest(args.manifest)
        normalizer = normalizer_for(args.cmd, timeout=args.timeout)
        result = normalizer.normalize_batch(m, out_dir / "normalized" / "images")
        path = save_manifest(result, out_dir / "normalized" / "manifest.csv")
    print(f"normalized {len(result)} samples -> {path}")
    return 0


def cmd_extract(args) -> int:
    with stage("extract"):
        cfg = _config(args, preset=args.preset, intensity=args.intensity)
        if cfg.preset == "deep":
            raise ValueError("preset 'deep' reads embeddings; nothing to extract")
        cache = FeatureCache(cfg.cache_dir)
        features = extract_all(load_manifest(args.manifest), cfg.preset, cache, cfg)
    stats = cache.stats()
    print(f"extracted {len(features)} samples into {cfg.cache_dir} "
          f"({stats['hits']} hits, {stats['misses']} misses)")
    return 0


def cmd_pairs(args) -> int:
    with stage("pairs"):
        out_dir = _out_dir(args)
        m = load_manifest(args.manifest)
        pairs = generate_pairs(m, attribute_differing_only=args.attribute_differing, variant=Variant(args.variant))
        path = save_pairs(pairs, out_dir / "pairs.csv")
    genuine, impostor = pairs.counts()
    print(f"{len(pairs)} pairs ({genuine} genuine, {impostor} impostor) -> {path}")
    return 0


def cmd_match(args) -> int:
    with stage("match"):
        cfg = _config(args, preset=args.preset, intensity=args.intensity, sift_ratio=args.ratio,
                      sift_symmetric=args.symmetric or None, embedding_dirs=args.embeddings or None)
        m = load_manifest(args.manifest)
        pairs = load_pairs(args.pairs)
        if cfg.preset == "deep":
            if len(cfg.embedding_dirs) != 1:
                raise ValueError("match with preset 'deep' takes exactly one --embeddings directory")
            features = load_embeddings(m, cfg.embedding_dirs[0])
            matcher_ids = None
        else:
            features = extract_all(m, cfg.preset, FeatureCache(cfg.cache_dir), cfg)
            matcher_ids = [e.extractor_id for e in build_extractors(cfg.preset, cfg)]
        table = match_pairs(pairs, features, matcher_ids, cfg.sift_ratio, cfg.sift_symmetric, cfg.workers)
        path = save_scores(table, Path(cfg.out_dir) / "scores_long.csv", matcher_ids)
    print(f"scored {len(table)} pairs with {matcher_columns(table)} -> {path}")
    return 0


def cmd_fuse(args) -> int:
    with stage("fuse"):
        out_dir = _out_dir(args)
        table = load_scores(args.scores)
        matcher_ids = args.matchers or matcher_columns(table)
        table = fuse_table(table, FusionConfig.from_weights(matcher_ids, args.weights))
        path = save_fused(table, out_dir / "fused.csv")
    print(f"fused {len(matcher_ids)} matchers over {len(table)} pairs -> {path}")
    return 0


def _read_score_table(path) -> pd.DataFrame:
    header = list(pd.read_csv(path, nrows=0).columns)
    return load_fused(path) if header == FUSED_COLUMNS else load_scores(path)


def cmd_evaluate(args) -> int:
    with stage("evaluate"):
        out_dir = _out_dir(args)
        table = pd.DataFrame()
        for path in args.scores:
            part = _read_score_table(path)
            table = part if table.empty else table.merge(part, on=["sample_id_a", "sample_id_b", "label"], how="outer")
        available = matcher_columns(table) + ([FUSED] if FUSED in table.columns else [])
        matcher_ids = args.matchers or available
        reports, _ = write_reports(table, matcher_ids, args.variant, out_dir, args.plots)
    for matcher_id, report in reports.items():
        print(f"{matcher_id}: AUC {report.auc:.6f}, decidability {report.decidability:.4f}, EER {report.eer:.4f}")
    return 0


def _load_report_dir(directory: Path) -> Dict[str, object]:
    reports_dir = directory / "reports" if (directory / "reports").is_dir() else directory
    paths = sorted(reports_dir.glob("*.json"))
    if not paths:
        raise FileNotFoundError(f"no report JSON files in {reports_dir}")
    return {r.matcher_id: r for r in (load_report(p) for p in paths)}


def cmd_compare(args) -> int:
    with stage("compare"):
        out_dir = _out_dir(args)
        a = _load_report_dir(Path(args.a))
        b = _load_report_dir(Path(args.b))
        shared = [m for m in a if m in b]
        if not shared:
            raise ValueError("the two report sets have no matcher in common")
        comparisons = [compare_reports(a[m], b[m]) for m in shared]
        ordered = [r for m in shared for r in (a[m], b[m])]
        save_comparison(comparisons_payload(comparisons, ordered), out_dir / "comparison.json")
        table = render_comparison_table(comparisons)
        (out_dir / "comparison.md").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_run(args) -> int:
    with stage("config"):
        cfg = _config(
            args,
            manifest_path=args.manifest,
            preset=args.preset,
            variant_under_test=args.variant,
            normalizer_command=args.cmd,
            plots=args.plots or None,
        )
    artifacts = run_experiment(cfg)
    print(artifacts.table_path.read_text(encoding="utf-8"), end="")
    print(f"artifacts written to {artifacts.out_dir}")
    return 0


def cmd_synthetic(args) -> int:
    with stage("synthetic"):
        path = make_synthetic_dataset(
            args.root,
            classes=args.classes,
            per_class=args.per_class,
            noise=args.noise,
            seed=args.seed if args.seed is not None else 0,
            size=args.size,
        )
    print(f"synthetic manifest -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periocular-eval",
        description="Periocular verification under attribute normalization",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, help="Random seed (default: 0)")
    parser.add_argument("--cache-dir", type=str, help="Feature cache directory")
    parser.add_argument("--out-dir", type=str, help="Directory for every written artifact")
    parser.add_argument("--workers", type=int, help="Worker threads for extraction and matching")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")

    sub = parser.add_subparsers(dest="command", required=True)
    presets = list(PRESETS)

    p = sub.add_parser("validate", help="Check a manifest and its image files")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", help="Disjoint subject split into train and eval manifests")
    p.add_argument("manifest")
    p.add_argument("--fraction", type=float, default=0.5, help="Share of subjects assigned to the training side")
    p.add_argument("--ordering", choices=ORDERING_CHOICES, default="lexicographic")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("normalize", help="Run an attribute normalizer over a manifest")
    p.add_argument("manifest")
    p.add_argument("--cmd", required=True, help="Command template with {in_dir} and {out_dir}, or 'identity'")
    p.add_argument("--timeout", type=float, default=None, help="Seconds before the command is killed")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("extract", help="Extract a preset's features into the cache")
    p.add_argument("manifest")
    p.add_argument("--preset", choices=presets, help="Matcher preset (default: proposed_fusion)")
    p.add_argument("--intensity", choices=INTENSITY_CHOICES, default=None)
    p.add_argument("--config", type=str, help="JSON config with extractor settings")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("pairs", help="Generate the all-against-all pair list")
    p.add_argument("manifest")
    p.add_argument("--attribute-differing", action="store_true",
                   help="Keep only pairs, genuine and impostor, whose images differ in the manifest attribute")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.ORIGINAL.value)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("match", help="Score a pair list with a preset's matchers")
    p.add_argument("manifest")
    p.add_argument("--pairs", required=True)
    p.add_argument("--preset", choices=presets, help="Matcher preset (default: proposed_fusion)")
    p.add_argument("--intensity", choices=INTENSITY_CHOICES, default=None)
    p.add_argument("--ratio", type=float, default=None, help="SIFT ratio-test threshold (default: 0.75)")
    p.add_argument("--symmetric", action="store_true", help="Average SIFT scores in both directions")
    p.add_argument("--embeddings", nargs="+", help="Embedding directory for preset 'deep'")
    p.add_argument("--config", type=str)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("fuse", help="Min-max normalize and fuse matcher scores")
    p.add_argument("--scores", required=True, help="Long score CSV")
    p.add_argument("--matchers", nargs="+", help="Matchers to fuse (default: all)")
    p.add_argument("--weights", nargs="+", type=float, help="One non-negative weight per matcher")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("evaluate", help="Compute AUC, decidability, EER and ROC per matcher")
    p.add_argument("--scores", nargs="+", required=True, help="Long score CSV and/or fused CSV")
    p.add_argument("--matchers", nargs="+")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.ORIGINAL.value)
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="Compare two directories of reports")
    p.add_argument("a", help="Reports of the first variant (usually original)")
    p.add_argument("b", help="Reports of the second variant (usually normalized)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="Run a full experiment")
    p.add_argument("--config", type=str, help="JSON experiment configuration")
    p.add_argument("--manifest", type=str)
    p.add_argument("--preset", choices=presets)
    p.add_argument("--variant", choices=VARIANT_CHOICES)
    p.add_argument("--cmd", type=str, help="Normalizer command template or 'identity'")
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synthetic", help="Write a synthetic noisy-texture dataset")
    p.add_argument("root")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=6)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--size", type=int, default=256)
    p.set_defaults(func=cmd_synthetic)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.debug or debug_enabled())

    try:
        return args.func(args)
    except StageError as e:
        logger.debug("stage failure", exc_info=True)
        print(f"error [{e.stage}]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
