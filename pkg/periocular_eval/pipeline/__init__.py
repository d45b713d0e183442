"""
Pipeline module: feature caching, presets, experiment execution and comparison.
"""

from .cache import FeatureCache
from .compare import (
    ReportAggregate,
    ReportComparison,
    SetComparison,
    aggregate_reports,
    compare_report_sets,
    compare_reports,
    comparisons_payload,
    percent_label,
    render_aggregate_table,
    render_comparison_table,
    render_report_table,
    save_comparison,
)
from .experiment import (
    RunArtifacts,
    StageError,
    VariantArtifacts,
    extract_all,
    load_embeddings,
    match_pairs,
    preprocess,
    run_experiment,
    stage,
    write_reports,
)
from .presets import PRESETS, build_extractors, preset_names
from .synthetic import make_synthetic_dataset

__all__ = [
    "FeatureCache",
    "ReportAggregate",
    "ReportComparison",
    "SetComparison",
    "aggregate_reports",
    "compare_report_sets",
    "compare_reports",
    "comparisons_payload",
    "percent_label",
    "render_aggregate_table",
    "render_comparison_table",
    "render_report_table",
    "save_comparison",
    "RunArtifacts",
    "StageError",
    "VariantArtifacts",
    "extract_all",
    "load_embeddings",
    "match_pairs",
    "preprocess",
    "run_experiment",
    "stage",
    "write_reports",
    "PRESETS",
    "build_extractors",
    "preset_names",
    "make_synthetic_dataset",
]
