"""Pixel-level primitives shared by segmentation and feature extraction.

Images are plain NumPy arrays:

* color image: float64 of shape (H, W, 3), values in [0, 1]
* gray image:  float64 of shape (H, W), values in [0, 1]
* binary mask: bool of shape (H, W), True = foreground
* label map:   int32 of shape (H, W), 0 = background

All operations are pure functions of their inputs and are safe to call
concurrently. The heavy loops are delegated to the selected kernel
backend (see ``leafsearch._kernels``).
"""

import numpy as np
from PIL import Image

from . import _kernels
from .errors import EmptySegmentationError

# Luma weights for RGB -> gray conversion.
GRAY_WEIGHTS = np.array([0.2989, 0.5870, 0.1140])

_SIXTEEN_BIT_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N"}


def load_image(path):
    """Load a PNG or JPEG file as a (H, W, 3) float64 array in [0, 1].

    8-bit channels are scaled by 1/255, 16-bit inputs by 1/65535.
    Grayscale files are replicated across the three channels; alpha is
    dropped.
    """
    with Image.open(path) as im:
        if im.mode in _SIXTEEN_BIT_MODES:
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        else:
            if im.mode not in ("RGB", "L"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    np.clip(arr, 0.0, 1.0, out=arr)
    return arr


def to_grayscale(img):
    """Convert a color image to gray via 0.2989 R + 0.5870 G + 0.1140 B."""
    gray = img @ GRAY_WEIGHTS
    return np.clip(gray, 0.0, 1.0)


def intensity_histogram(gray, nbins):
    """Count pixels into ``nbins`` equal-width bins over [0, 1].

    Bin ``i`` covers [i/nbins, (i+1)/nbins); the last bin also includes
    1.0. Returns an int64 array of length ``nbins`` summing to the pixel
    count.
    """
    if nbins < 2:
        raise ValueError(f"nbins must be >= 2, got {nbins}")
    idx = np.minimum((gray * nbins).astype(np.int64), nbins - 1)
    return np.bincount(idx.ravel(), minlength=nbins)


def binarize(gray, threshold):
    """Mark pixels strictly darker than ``threshold`` as foreground."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    return gray < threshold


def disk_offsets(radius):
    """Offsets (dy, dx) of the disk structuring element of ``radius``.

    The disk is the set of integer offsets with dy^2 + dx^2 <= radius^2,
    listed in raster order. It always contains (0, 0) and is symmetric
    under sign flips of either coordinate.
    """
    if radius < 1:
        raise ValueError(f"structuring element radius must be >= 1, got {radius}")
    span = np.arange(-radius, radius + 1, dtype=np.int64)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    keep = dy * dy + dx * dx <= radius * radius
    return np.stack([dy[keep], dx[keep]], axis=1)


def median_filter(mask, kernel=3):
    """Majority-vote filter over a kernel x kernel window.

    Border pixels are handled by replicating edge values. ``kernel`` must
    be odd and at least 3.
    """
    if kernel < 3 or kernel % 2 == 0:
        raise ValueError(f"median kernel must be odd and >= 3, got {kernel}")
    return _kernels.binary_median(mask, kernel)


def morph_open(img, se, domain):
    """Grayscale opening (erosion then dilation) restricted to ``domain``.

    Pixels outside ``domain`` read as +inf during erosion and -inf during
    dilation, so values never leak across the domain boundary. Output
    pixels outside ``domain`` are returned unchanged.
    """
    if img.shape != domain.shape:
        raise ValueError(
            f"image shape {img.shape} does not match domain shape {domain.shape}"
        )
    eroded = _kernels.grey_erode(img, se, domain)
    opened = _kernels.grey_dilate(eroded, se, domain)
    return np.where(domain, opened, img)


def binary_erode(mask, se):
    """Binary erosion; offsets falling outside the frame count as background."""
    return _kernels.binary_erode(mask, se)


def fill_holes(mask):
    """Fill background regions that have no 4-connected path to the border."""
    return _kernels.fill_holes(mask)


def connected_components(mask):
    """Label 8-connected foreground regions.

    Returns ``(labels, count)`` where labels are assigned in the raster
    order each component is first encountered (1-based; background is 0).
    """
    return _kernels.label_components(mask)


def largest_component(labels):
    """Mask of the largest labeled component; ties go to the smallest label."""
    count = int(labels.max(initial=0))
    if count == 0:
        raise EmptySegmentationError("no foreground components to select from")
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    best = int(np.argmax(sizes[1:])) + 1
    return labels == best
