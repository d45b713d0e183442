"""
Grayscale rasters, image reading and resampling.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Tuple

import cv2
import numpy as np
from scipy import ndimage

logger = logging.getLogger(__name__)

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class ImageError(ValueError):
    """Raised for unreadable, empty or ill-shaped images."""


class Intensity(Enum):
    """How a colour raster is reduced to one intensity channel."""
    MAX = "max"    # HSV value channel
    LUMA = "luma"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """
    Immutable 2-D intensity raster with values in [0, 1].

    Pixels are stored row-major as float64; (row, col) indexes the array.
    """
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64, copy=True)
        if pixels.ndim != 2:
            raise ImageError(f"gray image must be 2-D, got shape {pixels.shape}")
        if pixels.size == 0:
            raise ImageError("gray image is empty")
        if not np.all(np.isfinite(pixels)):
            raise ImageError("gray image contains non-finite values")
        if pixels.min() < 0.0 or pixels.max() > 1.0:
            raise ImageError(f"gray image values must lie in [0, 1], got [{pixels.min()}, {pixels.max()}]")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.shape, self.pixels.tobytes()))

    def to_uint8(self) -> np.ndarray:
        return np.round(self.pixels * 255.0).astype(np.uint8)


def _as_unit_range(raster: np.ndarray) -> np.ndarray:
    if raster.dtype == np.uint8:
        return raster.astype(np.float64) / 255.0
    return raster.astype(np.float64)


def to_grayscale(rgb, method: Intensity = Intensity.MAX) -> GrayImage:
    """
    Reduce a colour raster to its intensity channel.

    Parameters:
    - rgb: H x W x 3 array, uint8 (0-255) or float in [0, 1]; a 2-D array is
      taken as already gray
    - method: max(R, G, B) by default, or Rec. 601 luma

    Returns:
    - GrayImage with the same width and height
    """
    raster = np.asarray(rgb)
    if raster.size == 0 or 0 in raster.shape:
        raise ImageError("cannot convert a zero-sized image")
    values = _as_unit_range(raster)
    if values.ndim == 2:
        return GrayImage(values)
    if values.ndim != 3 or values.shape[2] < 3:
        raise ImageError(f"expected an H x W x 3 raster, got shape {raster.shape}")

    values = values[:, :, :3]
    if Intensity(method) is Intensity.MAX:
        gray = values.max(axis=2)
    else:
        gray = np.clip(values @ LUMA_WEIGHTS, 0.0, 1.0)
    return GrayImage(gray)


def read_image(path) -> np.ndarray:
    """Read a PNG/JPEG file as an RGB uint8 array."""
    path = Path(path)
    raster = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if raster is None:
        raise ImageError(f"cannot read image '{path}'")
    return cv2.cvtColor(raster, cv2.COLOR_BGR2RGB)


def load_gray(path, method: Intensity = Intensity.MAX) -> GrayImage:
    return to_grayscale(read_image(path), method=method)


def save_gray(img: GrayImage, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), img.to_uint8()):
        raise ImageError(f"cannot write image '{path}'")
    return path


def sample_bilinear(pixels: np.ndarray, rows: np.ndarray, cols: np.ndarray, cval: float = 0.0) -> np.ndarray:
    """Bilinear reads at continuous (row, col) positions; outside reads give cval."""
    return ndimage.map_coordinates(pixels, [rows, cols], order=1, mode="constant", cval=cval)


def resize(img: GrayImage, w: int, h: int) -> GrayImage:
    """
    Bilinear resize to exactly w x h pixels.

    Uses half-pixel alignment, src = (dst + 0.5) * scale - 0.5, with source
    coordinates clamped to the raster so edges replicate.
    """
    if w < 1 or h < 1:
        raise ImageError(f"target size must be at least 1x1, got {w}x{h}")
    if (h, w) == img.shape:
        return GrayImage(img.pixels)

    rows = (np.arange(h) + 0.5) * (img.height / h) - 0.5
    cols = (np.arange(w) + 0.5) * (img.width / w) - 0.5
    rows = np.clip(rows, 0.0, img.height - 1)
    cols = np.clip(cols, 0.0, img.width - 1)
    grid_r, grid_c = np.meshgrid(rows, cols, indexing="ij")

    out = ndimage.map_coordinates(img.pixels, [grid_r, grid_c], order=1, mode="nearest")
    return GrayImage(np.clip(out, 0.0, 1.0))
