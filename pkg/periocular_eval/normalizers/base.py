"""
Base classes for attribute normalizers.

A normalizer edits nuisance attributes (eyeglasses, gaze) of periocular
images out of process. The contract is directory based: the normalizer
receives a directory of input images named <sample_id><ext> and must write
exactly one output image per input, with the same stem, to an output
directory.
"""

import logging
import shutil
import tempfile
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

from ..data import Manifest
from ..data.manifest import as_normalized

logger = logging.getLogger(__name__)


class NormalizerType(Enum):
    """Available normalizer types."""
    IDENTITY = "identity"  # Byte copy, for pipeline checks
    COMMAND = "command"    # External tool behind a command template


class NormalizerError(RuntimeError):
    """Raised when the normalizer fails or breaks the 1:1 file contract."""

    def __init__(self, message: str, sample_id: Optional[str] = None):
        self.sample_id = sample_id
        super().__init__(f"sample '{sample_id}': {message}" if sample_id else message)


class Normalizer(ABC):
    """Abstract base class for attribute normalizers."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Human-readable normalizer name."""
        pass

    @abstractmethod
    def run(self, in_dir: Path, out_dir: Path, sample_ids: List[str]) -> None:
        """
        Normalize every image of in_dir into out_dir.

        Args:
            in_dir: Directory holding one <sample_id><ext> file per sample
            out_dir: Empty directory receiving the outputs
            sample_ids: Samples of this batch, for error messages
        """
        pass

    def is_available(self) -> tuple[bool, str]:
        """
        Check if this normalizer can run.

        Returns:
            Tuple of (is_available, message)
        """
        return True, "Normalizer available"

    def normalize_batch(self, m: Manifest, out_dir: Union[str, Path]) -> Manifest:
        """
        Run the normalizer over a whole manifest.

        Inputs are staged under their sample ids, the normalizer is invoked
        once, and each output is verified (present, unique, non-empty) before
        it is copied to out_dir/<sample_id><ext>.

        Returns:
            Manifest of normalized records mirroring the input order
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        sample_ids = [r.sample_id for r in m]
        for sample_id in sample_ids:
            if Path(sample_id).name != sample_id or sample_id in (".", ".."):
                raise NormalizerError("sample id cannot be used as a file name", sample_id)

        logger.info(f"Normalizing {len(m)} images with {self.name}")
        with tempfile.TemporaryDirectory(prefix="periocular-normalize-") as tmp:
            stage_in, stage_out = Path(tmp) / "in", Path(tmp) / "out"
            stage_in.mkdir()
            stage_out.mkdir()
            for record in m:
                shutil.copyfile(record.image_path, stage_in / f"{record.sample_id}{record.image_path.suffix}")

            self.run(stage_in, stage_out, sample_ids)
            outputs = _index_outputs(stage_out)

            records = []
            for record in m:
                produced = outputs.get(record.sample_id, [])
                if not produced:
                    raise NormalizerError("normalizer produced no output file", record.sample_id)
                if len(produced) > 1:
                    names = sorted(p.name for p in produced)
                    raise NormalizerError(f"normalizer produced several outputs: {names}", record.sample_id)
                if produced[0].stat().st_size == 0:
                    raise NormalizerError(f"output file '{produced[0].name}' is empty", record.sample_id)
                target = out_dir / produced[0].name
                shutil.copyfile(produced[0], target)
                records.append(as_normalized(record, target))

        unexpected = sorted(set(outputs) - set(sample_ids))
        if unexpected:
            logger.warning(f"Ignoring {len(unexpected)} normalizer outputs with unknown stems: {unexpected[:5]}")
        logger.info(f"Normalized {len(records)} images into {out_dir}")
        return m.select(records, suffix="")


def _index_outputs(directory: Path) -> Dict[str, List[Path]]:
    outputs: Dict[str, List[Path]] = {}
    for path in sorted(directory.iterdir()):
        if path.is_file():
            outputs.setdefault(path.stem, []).append(path)
    return outputs


def get_normalizer(normalizer_type: Union[NormalizerType, str], **config) -> Normalizer:
    """
    Factory function to get a normalizer instance.

    Args:
        normalizer_type: Which normalizer to use
        **config: Normalizer-specific configuration (command_template, timeout)

    Returns:
        Configured Normalizer instance
    """
    normalizer_type = NormalizerType(normalizer_type)
    if normalizer_type == NormalizerType.IDENTITY:
        from .identity import IdentityNormalizer
        return IdentityNormalizer(**config)
    elif normalizer_type == NormalizerType.COMMAND:
        from .external import CommandNormalizer
        return CommandNormalizer(**config)
    else:
        raise ValueError(f"Unknown normalizer type: {normalizer_type}")


def normalizer_for(command: str, **config) -> Normalizer:
    """'identity' selects the built-in copy; anything else is a command template."""
    if command.strip() == NormalizerType.IDENTITY.value:
        return get_normalizer(NormalizerType.IDENTITY)
    return get_normalizer(NormalizerType.COMMAND, command_template=command, **config)
