"""
Matcher presets, named after the method families they reproduce.
"""

from typing import Dict, List

from ..features import ExtractorType, FeatureExtractor, get_extractor
from ..utils.config import ExperimentConfig

PRESETS: Dict[str, List[ExtractorType]] = {
    "park": [ExtractorType.LBP, ExtractorType.HOG, ExtractorType.SIFT],
    "ahmed": [ExtractorType.MBTLBP],
    "proposed_fusion": [ExtractorType.LBP, ExtractorType.LPQ, ExtractorType.HOG, ExtractorType.SIFT],
    # embeddings are read from disk, nothing is extracted
    "deep": [],
}


def preset_names() -> List[str]:
    return list(PRESETS)


def build_extractors(preset: str, cfg: ExperimentConfig = None) -> List[FeatureExtractor]:
    """Configured extractors of a preset, in fusion order."""
    if preset not in PRESETS:
        raise ValueError(f"Unknown preset '{preset}'; choose one of {preset_names()}")
    cfg = cfg or ExperimentConfig()
    options = {
        ExtractorType.LBP: {"radius": cfg.lbp_radius},
        ExtractorType.LPQ: {"whiten": cfg.lpq_whiten},
        ExtractorType.HOG: {"size": cfg.hog_size},
        ExtractorType.SIFT: {},
        ExtractorType.MBTLBP: {"block": cfg.mbtlbp_block},
    }
    return [get_extractor(t, **options[t]) for t in PRESETS[preset]]
