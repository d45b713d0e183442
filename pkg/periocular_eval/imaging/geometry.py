"""
Geometric normalization of periocular images from annotated iris boxes.

Both eyes are brought to a canonical pose: the line joining the iris
centres is made horizontal and the inter-iris distance is scaled to a fixed
fraction of the crop size, then one square crop is cut around each iris.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..data.manifest import IrisBox
from .image import GrayImage, ImageError, sample_bilinear

logger = logging.getLogger(__name__)

DEFAULT_CROP_SIZE = 256
DEFAULT_EYE_DISTANCE_FRACTION = 0.4


@dataclass(frozen=True)
class AlignmentResult:
    """Two aligned eye crops plus the transform that produced them."""
    left_eye: GrayImage
    right_eye: GrayImage
    angle_deg: float
    scale: float
    left_center: Tuple[float, float]
    right_center: Tuple[float, float]
    out_size: int
    padded: bool

    def to_crop(self, x: float, y: float, eye: str = "left") -> Tuple[float, float]:
        """Map an input-image point (x, y) into the coordinates of one crop."""
        cx, cy = self.left_center if eye == "left" else self.right_center
        return _forward(x - cx, y - cy, math.radians(self.angle_deg), self.scale, self.out_size)


def _forward(dx: float, dy: float, theta: float, scale: float, out_size: int) -> Tuple[float, float]:
    c0 = (out_size - 1) / 2.0
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    u = scale * (cos_t * dx + sin_t * dy) + c0
    v = scale * (-sin_t * dx + cos_t * dy) + c0
    return u, v


def _warp_crop(img: GrayImage, center: Tuple[float, float], theta: float, scale: float, out_size: int):
    """Sample an out_size square centred on `center`, rotated by theta and scaled."""
    c0 = (out_size - 1) / 2.0
    grid_v, grid_u = np.meshgrid(np.arange(out_size) - c0, np.arange(out_size) - c0, indexing="ij")
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    src_x = center[0] + (cos_t * grid_u - sin_t * grid_v) / scale
    src_y = center[1] + (sin_t * grid_u + cos_t * grid_v) / scale

    eps = 1e-9
    padded = bool(
        src_x.min() < -eps or src_y.min() < -eps
        or src_x.max() > img.width - 1 + eps or src_y.max() > img.height - 1 + eps
    )
    out = sample_bilinear(img.pixels, src_y, src_x, cval=0.0)
    return GrayImage(np.clip(out, 0.0, 1.0)), padded


def _box_inside(img: GrayImage, box: IrisBox) -> bool:
    return box.x >= 0 and box.y >= 0 and box.x + box.w <= img.width and box.y + box.h <= img.height


def align_and_crop(
    img: GrayImage,
    left_iris: IrisBox,
    right_iris: IrisBox,
    out_size: int = DEFAULT_CROP_SIZE,
    eye_distance_fraction: float = DEFAULT_EYE_DISTANCE_FRACTION,
) -> AlignmentResult:
    """
    Rotate, scale and crop both eyes of an image.

    Parameters:
    - img: full image containing both eyes
    - left_iris, right_iris: annotated iris boxes (image left / image right)
    - out_size: side of each square output crop
    - eye_distance_fraction: target inter-iris distance as a fraction of out_size

    Returns:
    - AlignmentResult; `padded` is set when a crop reads outside the image
    """
    for name, box in (("left", left_iris), ("right", right_iris)):
        if not _box_inside(img, box):
            raise ImageError(f"{name} iris box {box} lies outside the {img.width}x{img.height} image")
    if out_size < 1:
        raise ImageError(f"out_size must be positive, got {out_size}")

    (lx, ly), (rx, ry) = left_iris.center, right_iris.center
    distance = math.hypot(rx - lx, ry - ly)
    if distance < 1e-9:
        raise ImageError("iris centres coincide; rotation and scale are undefined")

    theta = math.atan2(ry - ly, rx - lx)
    scale = eye_distance_fraction * out_size / distance

    left, left_padded = _warp_crop(img, (lx, ly), theta, scale, out_size)
    right, right_padded = _warp_crop(img, (rx, ry), theta, scale, out_size)
    padded = left_padded or right_padded
    if padded:
        logger.warning(f"Aligned crop exceeds image bounds (angle {math.degrees(theta):.1f}, "
                       f"scale {scale:.3f}); zero padding applied")

    return AlignmentResult(
        left_eye=left,
        right_eye=right,
        angle_deg=math.degrees(theta),
        scale=scale,
        left_center=(lx, ly),
        right_center=(rx, ry),
        out_size=out_size,
        padded=padded,
    )


def crop_around(img: GrayImage, box: IrisBox, out_size: int = DEFAULT_CROP_SIZE) -> Tuple[GrayImage, bool]:
    """Unrotated, unscaled square crop centred on one iris box, zero padded."""
    crop, padded = _warp_crop(img, box.center, 0.0, 1.0, out_size)
    if padded:
        logger.debug(f"Crop around {box} padded with zeros")
    return crop, padded
