"""
Configuration utilities for periocular_eval.

Experiment settings come from DEFAULT_CONFIG, overridden in turn by
environment variables, a JSON config file and command-line flags.
"""

import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)

VARIANT_CHOICES = ("original", "normalized", "both")
PRESET_NAMES = ("park", "ahmed", "proposed_fusion", "deep")
INTENSITY_CHOICES = ("max", "luma")
ORDERING_CHOICES = ("lexicographic", "manifest_order")
PATH_FIELDS = ("manifest_path", "normalized_manifest_path", "cache_dir", "out_dir")

# Default configuration
DEFAULT_CONFIG = {
    "manifest_path": None,
    "variant_under_test": "both",
    "normalizer_command": None,
    "normalized_manifest_path": None,
    "preset": "proposed_fusion",
    "fusion_weights": None,
    "attribute_differing_only": False,
    "split_fraction": None,
    "split_ordering": "lexicographic",
    "cache_dir": os.path.join(tempfile.gettempdir(), "periocular_cache"),
    "out_dir": "results",
    "seed": 0,
    "workers": 4,
    "sift_ratio": 0.75,
    "sift_symmetric": False,
    "hog_size": 368,
    "lbp_radius": 1.0,
    "mbtlbp_block": 3,
    "lpq_whiten": False,
    "intensity": "max",
    "crop_size": 256,
    "embedding_dirs": [],
    "plots": False,
}


class ConfigError(ValueError):
    """Raised for unknown keys or invalid values in a configuration."""


@dataclass
class ExperimentConfig:
    """One experiment; JSON config keys equal these field names."""
    manifest_path: Optional[str] = None
    variant_under_test: str = "both"
    normalizer_command: Optional[str] = None
    normalized_manifest_path: Optional[str] = None
    preset: str = "proposed_fusion"
    fusion_weights: Optional[List[float]] = None
    attribute_differing_only: bool = False
    split_fraction: Optional[float] = None
    split_ordering: str = "lexicographic"
    cache_dir: str = DEFAULT_CONFIG["cache_dir"]
    out_dir: str = "results"
    seed: int = 0
    workers: int = 4
    sift_ratio: float = 0.75
    sift_symmetric: bool = False
    hog_size: int = 368
    lbp_radius: float = 1.0
    mbtlbp_block: int = 3
    lpq_whiten: bool = False
    intensity: str = "max"
    crop_size: int = 256
    embedding_dirs: List[str] = field(default_factory=list)
    plots: bool = False

    @property
    def variants(self) -> List[str]:
        if self.variant_under_test == "both":
            return ["original", "normalized"]
        return [self.variant_under_test]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        unknown = sorted(set(data) - {f.name for f in fields(cls)})
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Check enum-like fields and numeric ranges."""
        checks = [
            ("variant_under_test", VARIANT_CHOICES),
            ("preset", PRESET_NAMES),
            ("intensity", INTENSITY_CHOICES),
            ("split_ordering", ORDERING_CHOICES),
        ]
        for name, choices in checks:
            if getattr(self, name) not in choices:
                raise ConfigError(f"{name} must be one of {list(choices)}, got {getattr(self, name)!r}")
        if self.split_fraction is not None and not 0.0 < self.split_fraction < 1.0:
            raise ConfigError(f"split_fraction must lie in (0, 1), got {self.split_fraction}")
        if not 0.0 < self.sift_ratio < 1.0:
            raise ConfigError(f"sift_ratio must lie in (0, 1), got {self.sift_ratio}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        for name in ("hog_size", "mbtlbp_block", "crop_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.lbp_radius <= 0:
            raise ConfigError(f"lbp_radius must be positive, got {self.lbp_radius}")
        if self.fusion_weights is not None and any(w < 0 for w in self.fusion_weights):
            raise ConfigError(f"fusion_weights must be non-negative, got {self.fusion_weights}")
        if self.preset == "deep" and not self.embedding_dirs:
            raise ConfigError("preset 'deep' needs at least one entry in embedding_dirs")

    def check_runnable(self) -> None:
        """Requirements that only apply to a full experiment run."""
        if not self.manifest_path:
            raise ConfigError("manifest_path is required")
        if "normalized" in self.variants and not (self.normalizer_command or self.normalized_manifest_path):
            raise ConfigError("the normalized variant needs normalizer_command or normalized_manifest_path")


def _env_overrides() -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if "PERIOCULAR_CACHE_DIR" in os.environ:
        overrides["cache_dir"] = os.environ["PERIOCULAR_CACHE_DIR"]
    if "PERIOCULAR_OUT_DIR" in os.environ:
        overrides["out_dir"] = os.environ["PERIOCULAR_OUT_DIR"]
    if "PERIOCULAR_WORKERS" in os.environ:
        try:
            overrides["workers"] = int(os.environ["PERIOCULAR_WORKERS"])
        except ValueError:
            raise ConfigError(f"PERIOCULAR_WORKERS must be an integer, got {os.environ['PERIOCULAR_WORKERS']!r}")
    return overrides


def debug_enabled() -> bool:
    return os.environ.get("PERIOCULAR_DEBUG", "").lower() in ("1", "true", "yes")


def get_config() -> Dict[str, Any]:
    """
    Get the default configuration with environment overrides applied.

    Returns:
    - Configuration dictionary
    """
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    config.update(_env_overrides())
    return config


def _resolve_paths(data: Dict[str, Any], base_dir: Path) -> Dict[str, Any]:
    resolved = dict(data)
    for name in PATH_FIELDS:
        value = resolved.get(name)
        if value and not Path(value).is_absolute():
            resolved[name] = str(base_dir / value)
    if resolved.get("embedding_dirs"):
        resolved["embedding_dirs"] = [
            d if Path(d).is_absolute() else str(base_dir / d) for d in resolved["embedding_dirs"]
        ]
    return resolved


def load_config(path=None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Build an ExperimentConfig.

    Parameters:
    - path: optional JSON file; unknown keys are rejected and relative paths
      are resolved against the file's directory
    - overrides: values from command-line flags; None entries are ignored

    Returns:
    - Validated ExperimentConfig
    """
    config = get_config()
    if path is not None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                file_config = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON: {e}") from e
        if not isinstance(file_config, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        unknown = sorted(set(file_config) - set(DEFAULT_CONFIG))
        if unknown:
            raise ConfigError(f"{path}: unknown configuration keys: {unknown}")
        config.update(_resolve_paths(file_config, path.parent.resolve()))
        logger.debug(f"Loaded configuration from {path}")

    if overrides:
        config.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(config)


def save_config(cfg: ExperimentConfig, path) -> Path:
    """
    Save the configuration to a file.

    Parameters:
    - cfg: ExperimentConfig to write
    - path: destination JSON file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    return path
