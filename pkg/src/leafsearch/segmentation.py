"""Leaf/background separation.

The pipeline: grayscale conversion, adaptive bimodal threshold, binary
median filtering, hole filling, and largest-component selection. The
threshold is found between the two dominant histogram modes (leaf and
background), so the same code handles dark leaves on light backgrounds
and the inverse.
"""

from dataclasses import dataclass

import numpy as np

from . import imaging
from .errors import EmptySegmentationError, UnimodalHistogramError

# Masks smaller than this fraction of the frame are rejected as failed
# segmentations; centroid and moment formulas degenerate on specks.
MIN_AREA_FRACTION = 0.001

_POLARITIES = ("auto", "dark_leaf", "light_leaf")


@dataclass(frozen=True)
class SegmentationConfig:
    nbins: int = 20
    median_kernel: int = 3
    polarity: str = "auto"

    def __post_init__(self):
        if self.nbins < 4:
            raise ValueError(f"nbins must be >= 4, got {self.nbins}")
        if self.median_kernel < 3 or self.median_kernel % 2 == 0:
            raise ValueError(
                f"median_kernel must be odd and >= 3, got {self.median_kernel}"
            )
        if self.polarity not in _POLARITIES:
            raise ValueError(
                f"polarity must be one of {_POLARITIES}, got {self.polarity!r}"
            )


@dataclass
class LeafRegion:
    """Segmentation result: the leaf mask plus the images it came from."""

    mask: np.ndarray
    gray: np.ndarray
    color: np.ndarray
    area: int


def adaptive_threshold(counts):
    """Threshold at the valley between the two dominant histogram peaks.

    The first peak is the highest-count bin; the second is the highest
    bin at least two bins away (so one wide mode is not counted twice).
    Between them, the lowest-count bin wins (ties to the lowest index)
    and its midpoint intensity is returned. Raises
    ``UnimodalHistogramError`` when no second mode exists.
    """
    counts = np.asarray(counts)
    nbins = len(counts)
    if np.count_nonzero(counts) < 2:
        raise UnimodalHistogramError(
            "histogram has fewer than two nonempty bins; nothing to threshold"
        )
    p1 = int(np.argmax(counts))
    apart = np.abs(np.arange(nbins) - p1) >= 2
    candidates = np.where(apart & (counts > 0), counts, -1)
    if candidates.max() < 0:
        raise UnimodalHistogramError(
            "no second histogram peak at least two bins from the first"
        )
    p2 = int(np.argmax(candidates))
    lo, hi = min(p1, p2), max(p1, p2)
    between = counts[lo + 1 : hi]
    if between.size == 0:
        raise UnimodalHistogramError("no bins strictly between the two peaks")
    valley = lo + 1 + int(np.argmin(between))
    return (valley + 0.5) / nbins


def _resolve_polarity(gray, threshold, polarity):
    """Pick which side of the threshold is the leaf.

    ``auto`` assumes the background reaches the frame border: the side
    with fewer border pixels is declared foreground (ties go dark).
    """
    if polarity == "dark_leaf":
        return True
    if polarity == "light_leaf":
        return False
    dark = gray < threshold
    border = np.concatenate([dark[0], dark[-1], dark[1:-1, 0], dark[1:-1, -1]])
    dark_contact = int(border.sum())
    return dark_contact <= border.size - dark_contact


def segment_stages(img, cfg=SegmentationConfig()):
    """Run the segmentation pipeline, keeping every intermediate.

    Returns a dict with keys ``gray``, ``threshold``, ``binary``,
    ``median``, ``filled``, ``largest``, and ``region``; useful for
    stage-by-stage inspection. Raises the same errors as
    ``segment_leaf``.
    """
    gray = imaging.to_grayscale(img)
    counts = imaging.intensity_histogram(gray, cfg.nbins)
    threshold = adaptive_threshold(counts)
    if _resolve_polarity(gray, threshold, cfg.polarity):
        binary = imaging.binarize(gray, threshold)
    else:
        binary = gray > threshold
    median = imaging.median_filter(binary, cfg.median_kernel)
    filled = imaging.fill_holes(median)
    labels, count = imaging.connected_components(filled)
    if count == 0:
        raise EmptySegmentationError("binarization produced no foreground pixels")
    mask = imaging.largest_component(labels)
    area = int(mask.sum())
    if area < MIN_AREA_FRACTION * mask.size:
        raise EmptySegmentationError(
            f"largest component has {area} pixels, below the "
            f"{MIN_AREA_FRACTION:.1%} frame-area floor"
        )
    return {
        "gray": gray,
        "threshold": threshold,
        "binary": binary,
        "median": median,
        "filled": filled,
        "largest": mask,
        "region": LeafRegion(mask=mask, gray=gray, color=img, area=area),
    }


def segment_leaf(img, cfg=SegmentationConfig()):
    """Separate the leaf from its background.

    Pipeline: grayscale -> histogram -> adaptive threshold -> binarize ->
    median filter -> fill holes -> keep the largest 8-connected
    component. Raises ``UnimodalHistogramError`` when no threshold can be
    found and ``EmptySegmentationError`` when the surviving region is
    smaller than ``MIN_AREA_FRACTION`` of the frame.
    """
    return segment_stages(img, cfg)["region"]
