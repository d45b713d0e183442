"""
Shared fixtures: synthetic images, manifests and score sets.
"""

import os
from pathlib import Path

import numpy as np
import pytest

HEADER = "sample_id,subject_id,eye,session,eyeglasses,gaze,image_path,variant,iris_x,iris_y,iris_w,iris_h"


def manifest_row(sample_id, subject_id, eye="left", session=1, eyeglasses=0, gaze="frontal",
                 image_path=None, variant="original", iris=("", "", "", "")):
    image_path = image_path or f"images/{sample_id}.png"
    return ",".join([sample_id, subject_id, eye, str(session), str(eyeglasses), gaze, image_path, variant,
                     *[str(v) for v in iris]])


def write_manifest_csv(path: Path, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join([HEADER, *rows]) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    """A 256x256 random GrayImage."""
    from periocular_eval.imaging import GrayImage
    return GrayImage(rng.random((256, 256)))


@pytest.fixture
def constant_image():
    from periocular_eval.imaging import GrayImage
    return GrayImage(np.full((256, 256), 0.5))


@pytest.fixture
def two_class_manifest(tmp_path):
    """
    Class A = {a1 (glasses), a2, a3}, class B = {b1 (glasses), b2}.

    Images are small random PNGs so the manifest also loads with path checks.
    """
    from periocular_eval.data import load_manifest
    from periocular_eval.imaging import GrayImage, save_gray

    rows = []
    gen = np.random.default_rng(7)
    for sample_id, subject, glasses in [("a1", "A", 1), ("a2", "A", 0), ("a3", "A", 0),
                                        ("b1", "B", 1), ("b2", "B", 0)]:
        save_gray(GrayImage(gen.random((64, 64))), tmp_path / "images" / f"{sample_id}.png")
        rows.append(manifest_row(sample_id, subject, eyeglasses=glasses))
    return load_manifest(write_manifest_csv(tmp_path / "manifest.csv", rows))


@pytest.fixture
def synthetic_manifest(tmp_path_factory):
    """Path of a small synthetic dataset: 6 classes x 4 noisy copies."""
    from periocular_eval.pipeline import make_synthetic_dataset
    root = tmp_path_factory.mktemp("synthetic")
    return make_synthetic_dataset(root, classes=6, per_class=4, noise=0.05, seed=3, size=128)


@pytest.fixture
def manifest_writer():
    """write_manifest_csv(path, rows)"""
    return write_manifest_csv


@pytest.fixture
def row_builder():
    """manifest_row(sample_id, subject_id, **fields) -> CSV line"""
    return manifest_row


@pytest.fixture
def real_manifest():
    """Resolve a dataset manifest from an environment variable, or skip."""
    def resolve(variable: str) -> Path:
        value = os.environ.get(variable)
        if not value:
            pytest.skip(f"{variable} is not set")
        return Path(value)
    return resolve
