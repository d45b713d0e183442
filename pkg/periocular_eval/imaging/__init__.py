"""
Imaging module: grayscale conversion, geometric normalization, tiling and resizing.
"""

from .image import GrayImage, ImageError, Intensity, load_gray, read_image, resize, save_gray, to_grayscale
from .geometry import AlignmentResult, align_and_crop, crop_around
from .patches import PatchGrid, assemble_patches, tile_patches

__all__ = [
    "GrayImage",
    "ImageError",
    "Intensity",
    "load_gray",
    "read_image",
    "resize",
    "save_gray",
    "to_grayscale",
    "AlignmentResult",
    "align_and_crop",
    "crop_around",
    "PatchGrid",
    "assemble_patches",
    "tile_patches",
]
