"""
End-to-end experiment execution.

A run goes through split, normalize, extract, pairs, match, fuse and report
for every requested image variant, then compares the variants. Every
artifact is a pure function of the configuration and the input files.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..data import (
    Manifest,
    PairList,
    SampleRecord,
    SubjectOrdering,
    Variant,
    generate_pairs,
    load_manifest,
    save_manifest,
    save_pairs,
    split_subjects,
)
from ..data.manifest import as_normalized
from ..features import Feature, FeatureExtractor, FeatureVector, KeypointSet, load_embedding
from ..imaging import GrayImage, ImageError, Intensity, crop_around, load_gray, resize
from ..matching import (
    DEFAULT_RATIO,
    FUSED,
    FusionConfig,
    MatchingError,
    cosine_similarity_matrix,
    fuse_table,
    save_fused,
    save_scores,
    sift_match_score,
)
from ..metrics import VerificationReport, report_from_table, save_report, save_roc_csv
from ..normalizers import normalizer_for
from ..utils.config import ExperimentConfig, save_config
from ..utils.visualization import plot_roc, plot_score_histograms
from .cache import FeatureCache
from .compare import (
    ReportComparison,
    SetComparison,
    compare_report_sets,
    compare_reports,
    comparisons_payload,
    aggregate_reports,
    render_aggregate_table,
    render_comparison_table,
    render_report_table,
    save_comparison,
)
from .presets import build_extractors

logger = logging.getLogger(__name__)

EMBEDDING_SUFFIX = ".emb"
SIFT_CHUNK = 256


class StageError(RuntimeError):
    """A failure inside one pipeline stage; `stage` names it."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(message)


@contextmanager
def stage(name: str):
    """Re-raise any failure in the block as a StageError tagged with `name`."""
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, str(e)) from e


# --- preprocessing and extraction --------------------------------------------

def _preprocess_config(record: SampleRecord, intensity: str, crop_size: int) -> Dict:
    box = record.iris_box
    return {
        "intensity": intensity,
        "crop_size": crop_size,
        "iris_box": None if box is None else [box.x, box.y, box.w, box.h],
    }


def preprocess(record: SampleRecord, intensity: str = "max", crop_size: int = 256) -> GrayImage:
    """Read, convert to intensity, crop around the iris box if any, resize to crop_size."""
    img = load_gray(record.image_path, Intensity(intensity))
    if record.iris_box is not None:
        img, _ = crop_around(img, record.iris_box, crop_size)
    if img.shape != (crop_size, crop_size):
        img = resize(img, crop_size, crop_size)
    return img


def extract_all(
    m: Manifest,
    preset: Union[str, Sequence[FeatureExtractor]],
    cache: Union[FeatureCache, str, Path],
    cfg: Optional[ExperimentConfig] = None,
) -> Dict[str, Dict[str, Feature]]:
    """
    Run the preset's extractors over every sample, through the cache.

    Returns:
    - {sample_id: {extractor_id: feature}} in manifest order
    """
    cfg = cfg or ExperimentConfig()
    extractors = build_extractors(preset, cfg) if isinstance(preset, str) else list(preset)
    cache = cache if isinstance(cache, FeatureCache) else FeatureCache(cache)

    def work(record: SampleRecord) -> Dict[str, Feature]:
        try:
            image_bytes = record.image_path.read_bytes()
        except OSError as e:
            raise ImageError(f"sample '{record.sample_id}': cannot read '{record.image_path}': {e}") from e
        prep = _preprocess_config(record, cfg.intensity, cfg.crop_size)
        loaded: List[GrayImage] = []

        def image() -> GrayImage:
            if not loaded:
                try:
                    loaded.append(preprocess(record, cfg.intensity, cfg.crop_size))
                except ImageError as e:
                    raise ImageError(f"sample '{record.sample_id}': {e}") from e
            return loaded[0]

        features = {}
        for extractor in extractors:
            key = cache.key(record.sample_id, extractor.extractor_id, image_bytes,
                            {"extractor": extractor.config, "preprocess": prep})
            features[extractor.extractor_id] = cache.get_or_compute(key, lambda ex=extractor: ex.extract(image()))
        return features

    logger.info(f"Extracting {[e.extractor_id for e in extractors]} for {len(m)} samples ({cfg.workers} workers)")
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(work, m.samples))

    features = {record.sample_id: result for record, result in zip(m.samples, results)}
    for extractor in extractors:
        if extractor.produces_keypoints:
            empty = sum(1 for f in features.values() if len(f[extractor.extractor_id]) == 0)
            if empty:
                logger.warning(f"{extractor.extractor_id}: {empty} of {len(m)} samples have no keypoints")
    stats = cache.stats()
    logger.info(f"Extraction done: {stats['hits']} cache hits, {stats['misses']} misses, {stats['corrupt']} corrupt")
    return features


def load_embeddings(m: Manifest, directory: Union[str, Path], expected_dim: int = 256) -> Dict[str, Dict[str, Feature]]:
    """Read <sample_id>.emb for every sample from a directory of precomputed embeddings."""
    directory = Path(directory)
    features = {}
    for record in m:
        vector = load_embedding(directory / f"{record.sample_id}{EMBEDDING_SUFFIX}", expected_dim)
        features[record.sample_id] = {vector.extractor_id: vector}
    logger.info(f"Loaded {len(features)} embeddings from {directory}")
    return features


# --- matching ----------------------------------------------------------------

def _pair_indices(pairs: PairList, sample_ids: List[str]) -> Tuple[np.ndarray, np.ndarray]:
    index = pd.Index(sample_ids)
    ia = index.get_indexer(pairs.sample_id_a)
    ib = index.get_indexer(pairs.sample_id_b)
    for column, positions in ((pairs.sample_id_a, ia), (pairs.sample_id_b, ib)):
        if (positions < 0).any():
            missing = column[int(np.flatnonzero(positions < 0)[0])]
            raise MatchingError(f"no features for sample '{missing}'")
    return ia, ib


def match_pairs(
    pairs: PairList,
    features: Dict[str, Dict[str, Feature]],
    matcher_ids: Optional[Sequence[str]] = None,
    ratio: float = DEFAULT_RATIO,
    symmetric: bool = False,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Score every pair with every matcher.

    Dense features use cosine similarity (a zero-norm vector scores 0 against
    everything); keypoint sets use the ratio-test match fraction.

    Returns:
    - wide score table: sample_id_a, sample_id_b, label, one column per matcher
    """
    sample_ids = list(features)
    if matcher_ids is None:
        matcher_ids = list(features[sample_ids[0]]) if sample_ids else []
    ia, ib = _pair_indices(pairs, sample_ids)
    table = pairs.to_frame()

    for matcher_id in matcher_ids:
        column = [features[s][matcher_id] for s in sample_ids]
        if all(isinstance(f, FeatureVector) for f in column):
            matrix = np.stack([f.values for f in column])
            zero = int(np.count_nonzero(~matrix.any(axis=1)))
            if zero:
                logger.warning(f"{matcher_id}: {zero} zero-norm feature vectors score 0 against every sample")
            gram = cosine_similarity_matrix(matrix, zero_norm_score=0.0)
            table[matcher_id] = gram[ia, ib]
        elif all(isinstance(f, KeypointSet) for f in column):
            def score_chunk(start: int, column=column) -> np.ndarray:
                stop = min(start + SIFT_CHUNK, len(ia))
                return np.array([sift_match_score(column[a], column[b], ratio, symmetric)
                                 for a, b in zip(ia[start:stop], ib[start:stop])], dtype=np.float64)

            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(score_chunk, range(0, len(ia), SIFT_CHUNK)))
            table[matcher_id] = np.concatenate(chunks) if chunks else np.zeros(0)
        else:
            raise MatchingError(f"matcher '{matcher_id}' mixes dense and keypoint features")
        logger.info(f"Scored {len(table)} pairs with {matcher_id}")
    return table


# --- reporting ---------------------------------------------------------------

@dataclass
class VariantArtifacts:
    """Files written for one image variant."""
    variant: str
    pairs_path: Path
    scores_path: Path
    fused_path: Optional[Path] = None
    manifest_path: Optional[Path] = None
    report_paths: Dict[str, Path] = field(default_factory=dict)
    roc_paths: Dict[str, Path] = field(default_factory=dict)
    plot_paths: List[Path] = field(default_factory=list)


@dataclass
class RunArtifacts:
    """Everything a run produced, with the in-memory reports."""
    out_dir: Path
    config_path: Path
    variants: Dict[str, VariantArtifacts]
    reports: Dict[Tuple[str, str], VerificationReport]
    comparisons: List[ReportComparison]
    set_comparisons: List[SetComparison]
    comparison_path: Path
    table_path: Path
    cache_stats: Dict[str, int]

    def report(self, matcher_id: str, variant: str) -> VerificationReport:
        return self.reports[(matcher_id, variant)]


def write_reports(
    table: pd.DataFrame,
    matcher_ids: Sequence[str],
    variant: str,
    out_dir: Path,
    plots: bool = False,
) -> Tuple[Dict[str, VerificationReport], VariantArtifacts]:
    """Build, save and optionally plot the report of every matcher column."""
    reports = {}
    artifacts = VariantArtifacts(variant=variant, pairs_path=out_dir / "pairs.csv", scores_path=out_dir / "scores_long.csv")
    for matcher_id in matcher_ids:
        report = report_from_table(table, matcher_id, variant)
        reports[matcher_id] = report
        artifacts.report_paths[matcher_id] = save_report(report, out_dir / "reports" / f"{matcher_id}.json")
        artifacts.roc_paths[matcher_id] = save_roc_csv(report.roc, out_dir / "roc" / f"{matcher_id}.csv")
        if plots:
            genuine = (table["label"] == "genuine").to_numpy()
            scores = table[matcher_id].to_numpy(dtype=np.float64)
            artifacts.plot_paths.append(plot_score_histograms(
                scores[genuine], scores[~genuine], out_dir / "plots" / f"{matcher_id}_scores.svg",
                title=f"{matcher_id} ({variant})",
            ))
    if plots and reports:
        artifacts.plot_paths.append(plot_roc(list(reports.values()), out_dir / "plots" / "roc.svg", title=f"ROC ({variant})"))
    return reports, artifacts


# --- run ---------------------------------------------------------------------

def _original_records(m: Manifest) -> Manifest:
    originals = [r for r in m if r.variant is Variant.ORIGINAL]
    if not originals:
        raise ValueError(f"manifest '{m.dataset_name}' has no original-variant samples")
    return m.select(originals)


def _normalized_manifest(cfg: ExperimentConfig, eval_m: Manifest, out_dir: Path) -> Manifest:
    if cfg.normalized_manifest_path:
        provided = load_manifest(cfg.normalized_manifest_path)
        records = []
        for record in eval_m:
            if record.sample_id not in provided:
                raise ValueError(f"sample '{record.sample_id}' is missing from the normalized manifest")
            records.append(as_normalized(record, provided.get(record.sample_id).image_path))
        return eval_m.select(records)

    normalizer = normalizer_for(cfg.normalizer_command)
    normalized = normalizer.normalize_batch(eval_m, out_dir / "normalized" / "images")
    save_manifest(normalized, out_dir / "normalized" / "manifest.csv")
    return normalized


def _deep_features(cfg: ExperimentConfig, m: Manifest, variant: str) -> Tuple[Dict[str, Dict[str, Feature]], List[str]]:
    """Merge every deep run into one feature map with one matcher id per run."""
    features: Dict[str, Dict[str, Feature]] = {r.sample_id: {} for r in m}
    matcher_ids = []
    many = len(cfg.embedding_dirs) > 1
    for run, template in enumerate(cfg.embedding_dirs, start=1):
        loaded = load_embeddings(m, template.replace("{variant}", variant))
        for sample_id, per_sample in loaded.items():
            for extractor_id, vector in per_sample.items():
                matcher_id = f"{extractor_id}-r{run}" if many else extractor_id
                features[sample_id][matcher_id] = vector
                if matcher_id not in matcher_ids:
                    matcher_ids.append(matcher_id)
    return features, matcher_ids


def _run_variant(
    cfg: ExperimentConfig,
    variant: str,
    m: Manifest,
    cache: FeatureCache,
    out_dir: Path,
) -> Tuple[Dict[str, VerificationReport], VariantArtifacts]:
    variant_dir = out_dir / variant
    logger.info(f"=== {variant} variant: {len(m)} samples ===")

    with stage("pairs"):
        pairs = generate_pairs(m, attribute_differing_only=cfg.attribute_differing_only, variant=Variant(variant))
        if len(pairs) == 0:
            raise ValueError("the protocol produced no pairs")

    with stage("extract"):
        if cfg.preset == "deep":
            features, matcher_ids = _deep_features(cfg, m, variant)
        else:
            features = extract_all(m, cfg.preset, cache, cfg)
            matcher_ids = [e.extractor_id for e in build_extractors(cfg.preset, cfg)]

    with stage("match"):
        table = match_pairs(pairs, features, matcher_ids, cfg.sift_ratio, cfg.sift_symmetric, cfg.workers)

    report_ids = list(matcher_ids)
    if cfg.preset != "deep":
        with stage("fuse"):
            table = fuse_table(table, FusionConfig.from_weights(matcher_ids, cfg.fusion_weights))
            report_ids.append(FUSED)

    with stage("evaluate"):
        reports, artifacts = write_reports(table, report_ids, variant, variant_dir, cfg.plots)
        save_pairs(pairs, artifacts.pairs_path)
        save_scores(table, artifacts.scores_path, matcher_ids)
        if FUSED in table.columns:
            artifacts.fused_path = save_fused(table, variant_dir / "fused.csv")
    return reports, artifacts


def run_experiment(cfg: ExperimentConfig) -> RunArtifacts:
    """
    Execute a configured experiment and write all artifacts under cfg.out_dir.

    Raises:
        StageError: naming the stage that failed
    """
    with stage("config"):
        cfg.validate()
        cfg.check_runnable()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_path = save_config(cfg, out_dir / "config.json")

    with stage("validate"):
        base = _original_records(load_manifest(cfg.manifest_path))

    with stage("split"):
        if cfg.split_fraction is not None:
            train, eval_m = split_subjects(base, cfg.split_fraction, SubjectOrdering(cfg.split_ordering))
            save_manifest(train, out_dir / "split" / "train.csv")
            save_manifest(eval_m, out_dir / "split" / "eval.csv")
            logger.info(f"Evaluating on {len(eval_m.subjects)} held-out subjects ({len(eval_m)} samples)")
        else:
            eval_m = base

    manifests = {}
    for variant in cfg.variants:
        if variant == Variant.ORIGINAL.value:
            manifests[variant] = eval_m
        else:
            with stage("normalize"):
                manifests[variant] = _normalized_manifest(cfg, eval_m, out_dir)

    with stage("extract"):
        cache = FeatureCache(cfg.cache_dir)

    reports: Dict[Tuple[str, str], VerificationReport] = {}
    variant_artifacts = {}
    for variant, m in manifests.items():
        variant_reports, artifacts = _run_variant(cfg, variant, m, cache, out_dir)
        if variant == Variant.NORMALIZED.value and not cfg.normalized_manifest_path:
            artifacts.manifest_path = out_dir / "normalized" / "manifest.csv"
        variant_artifacts[variant] = artifacts
        for matcher_id, report in variant_reports.items():
            reports[(matcher_id, variant)] = report

    with stage("compare"):
        comparisons, set_comparisons = [], []
        matcher_order = list(dict.fromkeys(m for m, _ in reports))
        if len(cfg.variants) == 2:
            a, b = cfg.variants
            comparisons = [compare_reports(reports[(m, a)], reports[(m, b)]) for m in matcher_order]
            if cfg.preset == "deep" and len(cfg.embedding_dirs) > 1:
                set_comparisons.append(compare_report_sets(
                    [reports[(m, a)] for m in matcher_order],
                    [reports[(m, b)] for m in matcher_order],
                    matcher_id="deep",
                ))

        ordered = [reports[(m, v)] for m in matcher_order for v in cfg.variants]
        comparison_path = save_comparison(
            comparisons_payload(comparisons, ordered, set_comparisons), out_dir / "comparison.json"
        )
        table = render_comparison_table(comparisons) if comparisons else render_report_table(ordered)
        if cfg.preset == "deep" and len(cfg.embedding_dirs) > 1:
            aggregates = [aggregate_reports([reports[(m, v)] for m in matcher_order], matcher_id="deep")
                          for v in cfg.variants]
            table += "\n" + render_aggregate_table(aggregates)
        table_path = out_dir / "comparison.md"
        table_path.write_text(table, encoding="utf-8")

    for c in comparisons:
        logger.info(f"{c.matcher_id}: decidability {c.variant_a} -> {c.variant_b} {c.decidability_change}")
    return RunArtifacts(
        out_dir=out_dir,
        config_path=config_path,
        variants=variant_artifacts,
        reports=reports,
        comparisons=comparisons,
        set_comparisons=set_comparisons,
        comparison_path=comparison_path,
        table_path=table_path,
        cache_stats=cache.stats(),
    )
