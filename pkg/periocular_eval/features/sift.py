"""
SIFT keypoints and descriptors via OpenCV.
"""

import logging
from typing import Any, Dict

import cv2
import numpy as np

from ..imaging import GrayImage, ImageError
from .base import FeatureExtractor, KeypointSet

logger = logging.getLogger(__name__)

MIN_SIDE = 32
OCTAVE_LAYERS = 3
CONTRAST_THRESHOLD = 0.03
EDGE_THRESHOLD = 10.0
SIGMA = 1.6


def extract_sift(
    img: GrayImage,
    contrast_threshold: float = CONTRAST_THRESHOLD,
    edge_threshold: float = EDGE_THRESHOLD,
) -> KeypointSet:
    """
    Detect DoG keypoints and compute 128-d descriptors.

    Descriptors are L2-normalized. Keypoints are sorted by (x, y, scale,
    orientation) so the output does not depend on OpenCV's thread scheduling.
    An image with no detections yields an empty set.
    """
    if img.height < MIN_SIDE or img.width < MIN_SIDE:
        raise ImageError(f"SIFT needs at least {MIN_SIDE}x{MIN_SIDE} pixels, got {img.width}x{img.height}")

    # detector objects are not shared between threads
    detector = cv2.SIFT_create(
        nfeatures=0,
        nOctaveLayers=OCTAVE_LAYERS,
        contrastThreshold=contrast_threshold,
        edgeThreshold=edge_threshold,
        sigma=SIGMA,
    )
    keypoints, descriptors = detector.detectAndCompute(img.to_uint8(), None)
    if descriptors is None or len(keypoints) == 0:
        logger.debug("SIFT found no keypoints")
        return KeypointSet.empty()

    points = np.array([(kp.pt[0], kp.pt[1], kp.size / 2.0, kp.angle) for kp in keypoints], dtype=np.float64)
    descriptors = descriptors.astype(np.float64)
    norms = np.linalg.norm(descriptors, axis=1, keepdims=True)
    descriptors = np.divide(descriptors, norms, out=np.zeros_like(descriptors), where=norms > 0)

    order = np.lexsort((points[:, 3], points[:, 2], points[:, 1], points[:, 0]))
    return KeypointSet(points[order], descriptors[order])


class SiftExtractor(FeatureExtractor):

    def __init__(self, contrast_threshold: float = CONTRAST_THRESHOLD, edge_threshold: float = EDGE_THRESHOLD, **kwargs):
        self.contrast_threshold = float(contrast_threshold)
        self.edge_threshold = float(edge_threshold)

    @property
    def extractor_id(self) -> str:
        return "sift"

    @property
    def config(self) -> Dict[str, Any]:
        return {
            "octave_layers": OCTAVE_LAYERS,
            "contrast_threshold": self.contrast_threshold,
            "edge_threshold": self.edge_threshold,
            "sigma": SIGMA,
        }

    @property
    def produces_keypoints(self) -> bool:
        return True

    def extract(self, img: GrayImage) -> KeypointSet:
        return extract_sift(img, self.contrast_threshold, self.edge_threshold)
