"""Color and vein features of the segmented leaf.

Color moments are the per-channel mean, standard deviation, and skewness
of the pixels under the mask. Vein features measure how much bright
fine structure a grayscale opening removes at disk radii 1..4: the
opening residue is thresholded, a thin band along the mask boundary is
discarded (contour artifacts), and the surviving pixel count is divided
by the leaf area.
"""

from dataclasses import dataclass

import numpy as np

from . import imaging
from .errors import EmptySegmentationError


@dataclass(frozen=True)
class VeinConfig:
    radii: tuple = (1, 2, 3, 4)
    tau: float = 0.02
    margin_width: int = 1

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"vein threshold must be positive, got {self.tau}")
        if list(self.radii) != sorted(set(self.radii)) or min(self.radii, default=0) < 1:
            raise ValueError(f"radii must be strictly increasing and >= 1, got {self.radii}")
        if self.margin_width < 0:
            raise ValueError(f"margin_width must be >= 0, got {self.margin_width}")


def color_moments(color, mask):
    """Nine color statistics over the masked pixels.

    Order: (mean, std, skew) for R, then G, then B. Skewness is the
    signed cube root of the third central moment, so its sign follows
    the sign of the moment.
    """
    if color.shape[:2] != mask.shape:
        raise ValueError(
            f"color shape {color.shape[:2]} does not match mask shape {mask.shape}"
        )
    pixels = color[mask]
    if pixels.shape[0] == 0:
        raise EmptySegmentationError("cannot take color moments of an empty mask")
    mean = pixels.mean(axis=0)
    centered = pixels - mean
    std = np.sqrt(np.maximum((centered**2).mean(axis=0), 0.0))
    skew = np.cbrt((centered**3).mean(axis=0))
    return np.stack([mean, std, skew], axis=1).ravel()


def vein_image(gray, mask, radius, cfg=VeinConfig()):
    """Binary image of vein-like pixels for one opening radius.

    The opening residue (gray minus its opening inside the mask) is
    thresholded at ``cfg.tau``; pixels within ``cfg.margin_width`` of the
    mask boundary are dropped.
    """
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    opened = imaging.morph_open(gray, imaging.disk_offsets(radius), mask)
    residue = gray - opened
    veins = mask & (residue > cfg.tau)
    if cfg.margin_width > 0:
        interior = imaging.binary_erode(mask, imaging.disk_offsets(cfg.margin_width))
        veins &= interior
    return veins


def vein_features(gray, mask, cfg=VeinConfig()):
    """Vein pixel count at each radius, as a fraction of the leaf area."""
    area = int(mask.sum())
    if area == 0:
        raise EmptySegmentationError("cannot take vein features of an empty mask")
    return np.array(
        [vein_image(gray, mask, r, cfg).sum() / area for r in cfg.radii]
    )
