"""
External normalizer implementation.

Runs any attribute-editing tool (for example a GAN that removes eyeglasses
and corrects gaze) through a command template with {in_dir} and {out_dir}
placeholders.
"""

import logging
import shlex
import shutil
import subprocess
from pathlib import Path
from typing import List, Optional

from ..base import Normalizer, NormalizerError

logger = logging.getLogger(__name__)

PLACEHOLDERS = ("{in_dir}", "{out_dir}")


class CommandNormalizer(Normalizer):
    """
    Normalizer backed by an external command.

    The template is split shell-style after substitution; it is not run
    through a shell.
    """

    def __init__(self, command_template: str, timeout: Optional[float] = None, **kwargs):
        """
        Initialize the command normalizer.

        Args:
            command_template: e.g. "attgan-edit --input {in_dir} --output {out_dir}"
            timeout: Seconds before the batch is abandoned (None waits forever)
        """
        missing = [p for p in PLACEHOLDERS if p not in command_template]
        if missing:
            raise ValueError(f"normalizer command must contain {' and '.join(missing)}: {command_template!r}")
        self.command_template = command_template
        self.timeout = timeout

    @property
    def name(self) -> str:
        return shlex.split(self.command_template)[0]

    def command(self, in_dir: Path, out_dir: Path) -> List[str]:
        filled = (self.command_template
                  .replace("{in_dir}", shlex.quote(str(in_dir)))
                  .replace("{out_dir}", shlex.quote(str(out_dir))))
        return shlex.split(filled)

    def is_available(self) -> tuple[bool, str]:
        program = self.name
        if shutil.which(program) is None and not Path(program).is_file():
            return False, f"'{program}' not found on PATH"
        return True, "Normalizer available"

    def run(self, in_dir: Path, out_dir: Path, sample_ids: List[str]) -> None:
        args = self.command(in_dir, out_dir)
        logger.debug(f"Running normalizer: {args}")
        first = sample_ids[0] if sample_ids else None
        try:
            result = subprocess.run(args, capture_output=True, text=True, timeout=self.timeout, check=False)
        except FileNotFoundError as e:
            raise NormalizerError(f"cannot start normalizer: {e}", first) from e
        except subprocess.TimeoutExpired as e:
            raise NormalizerError(f"normalizer timed out after {self.timeout}s on a batch of {len(sample_ids)}", first) from e

        if result.returncode != 0:
            stderr = (result.stderr or "").strip().splitlines()[-5:]
            raise NormalizerError(
                f"normalizer exited with status {result.returncode} on a batch of {len(sample_ids)} samples"
                + (": " + " | ".join(stderr) if stderr else ""),
                first,
            )
        if result.stdout:
            logger.debug(result.stdout.strip())
