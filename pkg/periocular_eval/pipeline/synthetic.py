"""
Synthetic periocular-like datasets for smoke runs and tests.

Each class owns a random texture; its samples are noisy copies of it.
Impostor images are therefore independent textures and genuine images differ
only by additive Gaussian noise.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..data import Gaze, Manifest, SampleRecord, save_manifest
from ..imaging import GrayImage, resize, save_gray

logger = logging.getLogger(__name__)

GAZES = [Gaze.FRONTAL, Gaze.LEFT, Gaze.RIGHT, Gaze.UP]


def class_texture(rng: np.random.Generator, size: int) -> np.ndarray:
    """Smooth random field at a class-specific scale blended with fine grain."""
    grid = int(rng.integers(4, 33))
    coarse = resize(GrayImage(rng.random((grid, grid))), size, size).pixels
    fine = rng.random((size, size))
    weight = rng.uniform(0.5, 0.9)
    return weight * coarse + (1.0 - weight) * fine


def make_synthetic_dataset(
    root: Union[str, Path],
    classes: int = 10,
    per_class: int = 6,
    noise: float = 0.05,
    seed: int = 0,
    size: int = 256,
    constant_classes: int = 0,
) -> Path:
    """
    Write PNG images and a manifest under root.

    Parameters:
    - root: output directory (images/ and manifest.csv are created)
    - classes: number of textured classes, one subject each
    - per_class: samples per class
    - noise: standard deviation of the per-sample Gaussian noise
    - seed: random seed; equal seeds give identical files
    - constant_classes: extra classes of flat images, for degenerate-input checks

    Returns:
    - path of the manifest CSV
    """
    if classes + constant_classes < 2 or per_class < 1:
        raise ValueError("need at least two classes and one sample per class")
    root = Path(root)
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    records = []
    for c in range(classes + constant_classes):
        subject = f"subj{c:03d}"
        if c < classes:
            base = class_texture(rng, size)
        else:
            base = np.full((size, size), 0.2 + 0.6 * (c - classes + 1) / (constant_classes + 1))
        for k in range(per_class):
            sample_id = f"{subject}_{k}"
            pixels = base if c >= classes else np.clip(base + rng.normal(0.0, noise, base.shape), 0.0, 1.0)
            relative = Path("images") / f"{sample_id}.png"
            save_gray(GrayImage(pixels), root / relative)
            records.append(SampleRecord(
                sample_id=sample_id,
                subject_id=subject,
                eye="left",
                session=1 + k // 2,
                eyeglasses=bool(k % 2),
                gaze=GAZES[k % len(GAZES)],
                image_path=relative,
            ))

    manifest = Manifest(dataset_name="synthetic", samples=records)
    path = save_manifest(manifest, root / "manifest.csv")
    logger.info(f"Wrote {len(records)} synthetic images ({classes} textured, {constant_classes} flat classes) to {root}")
    return path
