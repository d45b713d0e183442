"""
Identity normalizer: copies every input unchanged.
"""

import logging
import shutil
from pathlib import Path
from typing import List

from ..base import Normalizer

logger = logging.getLogger(__name__)


class IdentityNormalizer(Normalizer):
    """No-op normalizer; outputs are byte-identical to the inputs."""

    def __init__(self, **kwargs):
        pass

    @property
    def name(self) -> str:
        return "identity"

    def run(self, in_dir: Path, out_dir: Path, sample_ids: List[str]) -> None:
        for path in sorted(in_dir.iterdir()):
            shutil.copyfile(path, out_dir / path.name)
        logger.debug(f"Copied {len(sample_ids)} images")
