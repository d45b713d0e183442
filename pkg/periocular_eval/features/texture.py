"""
Local texture descriptors: uniform LBP, LPQ and MB-TLBP.

All three compute a code per pixel, histogram the codes per region and
concatenate the L1-normalized histograms in row-major region order.
"""

import logging
import math
import warnings
from typing import Any, Dict

import numpy as np
from scipy.linalg import svd
from scipy.signal import convolve2d
from scipy.spatial.distance import cdist
from skimage.feature import local_binary_pattern

from ..imaging import GrayImage, ImageError, PatchGrid, tile_patches
from .base import FeatureExtractor, FeatureVector, l1_normalize

logger = logging.getLogger(__name__)

LBP_POINTS = 8
LPQ_WINDOW = 7
LPQ_RHO = 0.90
GRID = (4, 4)

# integer 8-neighbourhood, same circular order as the LBP neighbours
RING_OFFSETS = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)]


# --- uniform LBP -------------------------------------------------------------

def _transitions(code: int, points: int) -> int:
    bits = [(code >> i) & 1 for i in range(points)]
    return sum(bits[i] != bits[(i + 1) % points] for i in range(points))


def uniform_mapping(points: int = LBP_POINTS) -> np.ndarray:
    """
    Lookup table code -> u2 bin.

    Uniform codes (at most two circular bit transitions) get bins
    0..P(P-1)+1 in increasing code order; every other code shares the last bin.
    """
    table = np.empty(2 ** points, dtype=np.int64)
    uniform = [c for c in range(2 ** points) if _transitions(c, points) <= 2]
    catch_all = len(uniform)
    table.fill(catch_all)
    for index, code in enumerate(uniform):
        table[code] = index
    return table


def _shifted(pixels: np.ndarray, margin: int, oy: int, ox: int) -> np.ndarray:
    h, w = pixels.shape
    return pixels[margin + oy:h - margin + oy, margin + ox:w - margin + ox]


def lbp_codes(pixels: np.ndarray, points: int = LBP_POINTS, radius: float = 1.0) -> np.ndarray:
    """
    Raw LBP codes of every pixel at least ceil(radius) from the border.

    Neighbour p sits at (-R sin(2 pi p / P), R cos(2 pi p / P)) and sets bit p
    when its bilinear sample is >= the centre.
    """
    margin = int(math.ceil(radius))
    with warnings.catch_warnings():
        # patches stay float64
        warnings.filterwarnings("ignore", message="Applying `local_binary_pattern` to floating-point")
        codes = local_binary_pattern(np.array(pixels, dtype=np.float64), points, radius, method="default")
    h, w = codes.shape
    return codes[margin:h - margin, margin:w - margin].astype(np.int64)


def lbp_histogram(patch: GrayImage, radius: float = 1.0, mapping: np.ndarray = None) -> np.ndarray:
    mapping = uniform_mapping(LBP_POINTS) if mapping is None else mapping
    margin = int(math.ceil(radius))
    if patch.height < 2 * margin + 1 or patch.width < 2 * margin + 1:
        raise ImageError(f"LBP needs patches of at least {2 * margin + 1}x{2 * margin + 1}, got {patch.width}x{patch.height}")
    codes = mapping[lbp_codes(patch.pixels, LBP_POINTS, radius)]
    n_bins = int(mapping.max()) + 1
    return l1_normalize(np.bincount(codes.ravel(), minlength=n_bins))


def extract_lbp(grid: PatchGrid, radius: float = 1.0) -> FeatureVector:
    """
    Uniform LBP (8 neighbours, u2 mapping, 59 bins) per patch, concatenated.

    A 4x4 grid yields 16 * 59 = 944 dims.
    """
    mapping = uniform_mapping(LBP_POINTS)
    histograms = [lbp_histogram(patch, radius, mapping) for patch in grid]
    return FeatureVector(np.concatenate(histograms), extractor_id=f"lbp-u2-{LBP_POINTS}-{radius:g}")


# --- LPQ ---------------------------------------------------------------------

def lpq_frequencies(window: int = LPQ_WINDOW):
    """(row, col) frequencies of the four STFT points u1..u4."""
    a = 1.0 / window
    return [(0.0, a), (a, 0.0), (a, a), (-a, a)]


def lpq_coefficients(window: int = LPQ_WINDOW):
    """
    Complex weights of each STFT point over the window offsets.

    F(u, x) = sum_y f(x + y) * exp(-2j*pi*<u, y>) for y in [-r, r]^2.
    """
    r = (window - 1) // 2
    offsets = np.arange(-r, r + 1, dtype=np.float64)
    yr, yc = np.meshgrid(offsets, offsets, indexing="ij")
    return [np.exp(-2j * np.pi * (ur * yr + uc * yc)) for ur, uc in lpq_frequencies(window)]


def _whitening(coefficients, window: int, rho: float = LPQ_RHO) -> np.ndarray:
    r = (window - 1) // 2
    yr, yc = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    positions = np.column_stack([yr.ravel(), yc.ravel()])
    covariance = rho ** cdist(positions, positions, metric="euclidean")
    rows = []
    for coef in coefficients:
        rows.append(coef.real.ravel())
        rows.append(coef.imag.ravel())
    m = np.vstack(rows)
    _, _, vh = svd(m @ covariance @ m.T)
    return vh.T


def lpq_responses(pixels: np.ndarray, window: int = LPQ_WINDOW) -> np.ndarray:
    """Real/imag STFT responses, shape (H - w + 1, W - w + 1, 8)."""
    channels = []
    for coef in lpq_coefficients(window):
        # convolution flips the kernel, so feed it pre-flipped
        response = convolve2d(pixels, coef[::-1, ::-1], mode="valid")
        channels.append(response.real)
        channels.append(response.imag)
    return np.stack(channels, axis=-1)


def lpq_codes(pixels: np.ndarray, window: int = LPQ_WINDOW, whiten: bool = False) -> np.ndarray:
    responses = lpq_responses(pixels, window)
    if whiten:
        responses = responses @ _whitening(lpq_coefficients(window), window)
    weights = 1 << np.arange(responses.shape[-1], dtype=np.int64)
    return ((responses >= 0).astype(np.int64) * weights).sum(axis=-1)


def extract_lpq(grid: PatchGrid, window: int = LPQ_WINDOW, whiten: bool = False) -> FeatureVector:
    """
    LPQ with a uniform STFT window per patch, 256-bin histograms concatenated.

    A 4x4 grid yields 16 * 256 = 4096 dims.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"LPQ window must be an odd number >= 3, got {window}")
    histograms = []
    for patch in grid:
        if patch.height < window or patch.width < window:
            raise ImageError(f"LPQ window {window} does not fit a {patch.width}x{patch.height} patch")
        codes = lpq_codes(patch.pixels, window, whiten)
        histograms.append(l1_normalize(np.bincount(codes.ravel(), minlength=256)))
    suffix = "-w" if whiten else ""
    return FeatureVector(np.concatenate(histograms), extractor_id=f"lpq-{window}{suffix}")


# --- MB-TLBP -----------------------------------------------------------------

def mean_pool(pixels: np.ndarray, block: int) -> np.ndarray:
    """Non-overlapping block averages; trailing rows/cols that do not fill a block are dropped."""
    h, w = pixels.shape[0] // block, pixels.shape[1] // block
    return pixels[:h * block, :w * block].reshape(h, block, w, block).mean(axis=(1, 3))


def transitional_codes(pooled: np.ndarray) -> np.ndarray:
    """Bit i set iff neighbour (i+1) mod 8 >= neighbour i, around the 8-neighbourhood."""
    neighbors = [_shifted(pooled, 1, dy, dx) for dy, dx in RING_OFFSETS]
    codes = np.zeros(neighbors[0].shape, dtype=np.int64)
    for i in range(8):
        codes |= (neighbors[(i + 1) % 8] >= neighbors[i]).astype(np.int64) << i
    return codes


def extract_mbtlbp(img: GrayImage, block: int = 3, regions=GRID) -> FeatureVector:
    """
    Multi-block transitional LBP.

    The image is mean-pooled into block x block cells, every interior cell is
    encoded by comparing consecutive circular neighbours, and the code map is
    split into a regions grid of 256-bin histograms (4096 dims for 4x4).
    """
    if block < 1:
        raise ValueError(f"block must be positive, got {block}")
    if img.height < 3 * block or img.width < 3 * block:
        raise ImageError(f"MB-TLBP with block {block} needs at least {3 * block}x{3 * block} pixels, got {img.width}x{img.height}")

    codes = transitional_codes(mean_pool(img.pixels, block))
    rows, cols = regions
    if codes.shape[0] < rows or codes.shape[1] < cols:
        raise ImageError(f"{codes.shape[1]}x{codes.shape[0]} code map cannot be split into {rows}x{cols} regions")

    histograms = []
    for band in np.array_split(codes, rows, axis=0):
        for region in np.array_split(band, cols, axis=1):
            histograms.append(l1_normalize(np.bincount(region.ravel(), minlength=256)))
    return FeatureVector(np.concatenate(histograms), extractor_id=f"mbtlbp-{block}x{block}")


# --- extractor wrappers ------------------------------------------------------

class LbpExtractor(FeatureExtractor):
    """Patch-wise uniform LBP over a 4x4 grid."""

    def __init__(self, radius: float = 1.0, grid=GRID, **kwargs):
        self.radius = float(radius)
        self.grid = tuple(grid)

    @property
    def extractor_id(self) -> str:
        return f"lbp-u2-{LBP_POINTS}-{self.radius:g}"

    @property
    def config(self) -> Dict[str, Any]:
        return {"points": LBP_POINTS, "radius": self.radius, "grid": list(self.grid)}

    def extract(self, img: GrayImage) -> FeatureVector:
        return extract_lbp(tile_patches(img, *self.grid), radius=self.radius)


class LpqExtractor(FeatureExtractor):
    """Patch-wise LPQ over a 4x4 grid."""

    def __init__(self, window: int = LPQ_WINDOW, whiten: bool = False, grid=GRID, **kwargs):
        self.window = int(window)
        self.whiten = bool(whiten)
        self.grid = tuple(grid)

    @property
    def extractor_id(self) -> str:
        return f"lpq-{self.window}" + ("-w" if self.whiten else "")

    @property
    def config(self) -> Dict[str, Any]:
        return {"window": self.window, "whiten": self.whiten, "grid": list(self.grid)}

    def extract(self, img: GrayImage) -> FeatureVector:
        return extract_lpq(tile_patches(img, *self.grid), window=self.window, whiten=self.whiten)


class MbtlbpExtractor(FeatureExtractor):

    def __init__(self, block: int = 3, regions=GRID, **kwargs):
        self.block = int(block)
        self.regions = tuple(regions)

    @property
    def extractor_id(self) -> str:
        return f"mbtlbp-{self.block}x{self.block}"

    @property
    def config(self) -> Dict[str, Any]:
        return {"block": self.block, "regions": list(self.regions)}

    def extract(self, img: GrayImage) -> FeatureVector:
        return extract_mbtlbp(img, block=self.block, regions=self.regions)
