"""
Non-overlapping patch tiling.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .image import GrayImage, ImageError


@dataclass(frozen=True)
class PatchGrid:
    """Row-major grid of equally sized patches."""
    patches: List[GrayImage]
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows * self.cols != len(self.patches):
            raise ImageError(f"{self.rows}x{self.cols} grid needs {self.rows * self.cols} patches, got {len(self.patches)}")
        shapes = {p.shape for p in self.patches}
        if len(shapes) > 1:
            raise ImageError(f"patches have differing shapes: {sorted(shapes)}")

    def __len__(self) -> int:
        return len(self.patches)

    def __iter__(self):
        return iter(self.patches)

    @property
    def patch_shape(self):
        return self.patches[0].shape


def tile_patches(img: GrayImage, rows: int = 4, cols: int = 4) -> PatchGrid:
    """Split an image into rows x cols equal patches (row-major)."""
    if rows < 1 or cols < 1:
        raise ImageError(f"grid must be at least 1x1, got {rows}x{cols}")
    if img.height % rows or img.width % cols:
        raise ImageError(f"{img.width}x{img.height} image is not divisible into a {rows}x{cols} grid")

    ph, pw = img.height // rows, img.width // cols
    blocks = img.pixels.reshape(rows, ph, cols, pw).swapaxes(1, 2)
    patches = [GrayImage(blocks[r, c]) for r in range(rows) for c in range(cols)]
    return PatchGrid(patches=patches, rows=rows, cols=cols)


def assemble_patches(grid: PatchGrid) -> GrayImage:
    """Inverse of tile_patches."""
    ph, pw = grid.patch_shape
    stacked = np.stack([p.pixels for p in grid.patches]).reshape(grid.rows, grid.cols, ph, pw)
    return GrayImage(stacked.swapaxes(1, 2).reshape(grid.rows * ph, grid.cols * pw))
