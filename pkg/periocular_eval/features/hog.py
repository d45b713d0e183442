"""
Histogram of oriented gradients over the whole crop.

Each pixel votes its gradient magnitude into the two orientation bins whose
centres bracket its unsigned angle, split linearly by angular distance.
"""

import logging
from typing import Any, Dict, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..imaging import GrayImage, resize
from .base import FeatureExtractor, FeatureVector

logger = logging.getLogger(__name__)

HOG_SIZE = 368
ORIENTATIONS = 9
PIXELS_PER_CELL = (8, 8)
CELLS_PER_BLOCK = (2, 2)
L2HYS_CLIP = 0.2
EPS = 1e-5


def hog_dims(size: int = HOG_SIZE) -> int:
    """Length of the descriptor for a size x size input."""
    cells = size // PIXELS_PER_CELL[0]
    blocks = cells - CELLS_PER_BLOCK[0] + 1
    return blocks * blocks * CELLS_PER_BLOCK[0] * CELLS_PER_BLOCK[1] * ORIENTATIONS


def gradients(pixels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Central differences along rows and columns; border rows/columns are zero."""
    g_row = np.zeros_like(pixels, dtype=np.float64)
    g_col = np.zeros_like(pixels, dtype=np.float64)
    g_row[1:-1, :] = pixels[2:, :] - pixels[:-2, :]
    g_col[:, 1:-1] = pixels[:, 2:] - pixels[:, :-2]
    return g_row, g_col


def cell_histograms(pixels: np.ndarray, cell: int = PIXELS_PER_CELL[0],
                    orientations: int = ORIENTATIONS) -> np.ndarray:
    """
    Magnitude-weighted orientation histograms per cell.

    Bin k is centred at k * 180 / orientations degrees and the last bin wraps
    onto the first. Trailing pixels that do not fill a cell are ignored.

    Returns:
    - array of shape (cell_rows, cell_cols, orientations)
    """
    n_rows, n_cols = pixels.shape[0] // cell, pixels.shape[1] // cell
    g_row, g_col = gradients(np.asarray(pixels, dtype=np.float64))
    g_row = g_row[: n_rows * cell, : n_cols * cell]
    g_col = g_col[: n_rows * cell, : n_cols * cell]

    magnitude = np.hypot(g_row, g_col)
    position = (np.rad2deg(np.arctan2(g_row, g_col)) % 180.0) / (180.0 / orientations)
    floor = np.floor(position)
    upper_weight = position - floor
    lower = floor.astype(np.int64) % orientations
    upper = (lower + 1) % orientations

    cell_index = (np.arange(n_rows * cell) // cell)[:, None] * n_cols + (np.arange(n_cols * cell) // cell)[None, :]
    base = cell_index * orientations
    size = n_rows * n_cols * orientations
    hist = np.bincount((base + lower).ravel(), (magnitude * (1.0 - upper_weight)).ravel(), minlength=size)
    hist += np.bincount((base + upper).ravel(), (magnitude * upper_weight).ravel(), minlength=size)
    return hist.reshape(n_rows, n_cols, orientations)


def normalize_blocks(cells: np.ndarray, block: int = CELLS_PER_BLOCK[0]) -> np.ndarray:
    """
    L2-Hys normalization of overlapping block x block cell windows, stride one cell.

    Output order is block-row, block-col, cell-row, cell-col, orientation.
    """
    windows = sliding_window_view(cells, (block, block), axis=(0, 1))
    blocks = windows.transpose(0, 1, 3, 4, 2).reshape(windows.shape[0], windows.shape[1], -1)
    out = blocks / np.sqrt(np.sum(blocks ** 2, axis=-1, keepdims=True) + EPS ** 2)
    out = np.minimum(out, L2HYS_CLIP)
    out = out / np.sqrt(np.sum(out ** 2, axis=-1, keepdims=True) + EPS ** 2)
    return out.ravel()


def extract_hog(img: GrayImage, size: int = HOG_SIZE) -> FeatureVector:
    """
    9-bin unsigned HOG with 8x8 cells and 2x2 L2-Hys blocks.

    The crop is resampled to size x size first; at 368 this gives
    45 * 45 * 36 = 72,900 dims.
    """
    if size < PIXELS_PER_CELL[0] * CELLS_PER_BLOCK[0]:
        raise ValueError(f"HOG input size must be at least {PIXELS_PER_CELL[0] * CELLS_PER_BLOCK[0]}, got {size}")
    if img.height != img.width:
        logger.debug(f"HOG input {img.width}x{img.height} is not square; resampling to {size}x{size}")

    resized = resize(img, size, size)
    values = normalize_blocks(cell_histograms(resized.pixels), CELLS_PER_BLOCK[0])
    return FeatureVector(values, extractor_id=f"hog-{size}")


class HogExtractor(FeatureExtractor):

    def __init__(self, size: int = HOG_SIZE, **kwargs):
        self.size = int(size)

    @property
    def extractor_id(self) -> str:
        return f"hog-{self.size}"

    @property
    def config(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "orientations": ORIENTATIONS,
            "pixels_per_cell": list(PIXELS_PER_CELL),
            "cells_per_block": list(CELLS_PER_BLOCK),
            "vote": "bilinear",
        }

    def extract(self, img: GrayImage) -> FeatureVector:
        return extract_hog(img, self.size)
