"""Polar Fourier shape descriptors of a leaf silhouette.

Each foreground pixel is expressed in polar coordinates around the mask
centroid, and a small grid of Fourier coefficients is accumulated over
the silhouette:

    C(rho, phi) = sum over pixels of exp(-j * (2*pi*(r/R)*rho + theta*phi))

with r the pixel's distance from the centroid, R the largest such
distance, and theta its angle in [0, 2*pi). Coefficient magnitudes are
invariant to rotation (phase is discarded) and translation (coordinates
are centroid-relative); dividing the DC term by the enclosing-circle
area pi*R^2 and every other term by the DC magnitude adds scale
invariance.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShapeError, EmptySegmentationError


@dataclass(frozen=True)
class PftConfig:
    """Descriptor grid size: m radial x n angular frequencies."""

    m: int = 4
    n: int = 6

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"frequency counts must be >= 1, got m={self.m} n={self.n}")


@dataclass
class PftCoefficients:
    coeffs: np.ndarray  # complex, shape (m, n)
    max_radius: float
    area: int


def centroid(mask):
    """Mean (x, y) position of the foreground pixels."""
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise EmptySegmentationError("cannot take the centroid of an empty mask")
    return float(xs.mean()), float(ys.mean())


def pf2(mask, cfg=PftConfig()):
    """Accumulate the polar Fourier coefficient grid over the silhouette.

    Uses each pixel's exact angle rather than a quantized set of spokes.
    Raises ``DegenerateShapeError`` for single-pixel masks (R = 0).
    """
    xc, yc = centroid(mask)
    ys, xs = np.nonzero(mask)
    rr = np.hypot(xs - xc, ys - yc)
    max_radius = float(rr.max())
    if max_radius == 0.0:
        raise DegenerateShapeError("mask has zero radius around its centroid")
    theta = np.mod(np.arctan2(ys - yc, xs - xc), 2.0 * np.pi)
    radial = np.exp(-2j * np.pi * np.outer(rr / max_radius, np.arange(cfg.m)))
    angular = np.exp(-1j * np.outer(theta, np.arange(cfg.n)))
    coeffs = np.einsum("pm,pn->mn", radial, angular)
    return PftCoefficients(coeffs=coeffs, max_radius=max_radius, area=int(xs.size))


def normalize_descriptors(coef):
    """Flatten coefficient magnitudes into a scale-invariant descriptor.

    Entry 0 is |C(0,0)| / (pi * R^2); every other entry is its magnitude
    divided by |C(0,0)|, in row-major (rho, phi) order.
    """
    mags = np.abs(coef.coeffs).ravel()
    out = mags / mags[0]
    out[0] = mags[0] / (np.pi * coef.max_radius**2)
    return out


def shape_descriptor(mask, cfg=PftConfig()):
    """Centroid -> polar Fourier grid -> normalized magnitudes."""
    return normalize_descriptors(pf2(mask, cfg))
