"""Pure NumPy/SciPy implementation of the pixel kernels.

This is the fallback backend used when the compiled extension is not
built. Both backends implement the same contracts and are cross-checked
by the test suite:

* ``grey_erode`` / ``grey_dilate``: neighborhood min/max over an offset
  set, reading pixels outside ``domain`` (or outside the frame) as +inf
  for erosion and -inf for dilation. Output pixels with no valid
  contributor are +inf / -inf respectively.
* ``binary_erode``: offsets falling outside the frame count as background.
* ``binary_median``: majority vote in a k x k window with edge replication.
* ``fill_holes``: background regions without a 4-connected path to the
  frame border become foreground.
* ``label_components``: 8-connected labeling, labels numbered by the
  raster-scan order in which each component is first encountered.
"""

import numpy as np
import scipy.ndimage as ndi

_EIGHT = np.ones((3, 3), dtype=bool)


def grey_erode(img, offsets, domain):
    h, w = img.shape
    r = int(np.abs(offsets).max())
    padded = np.full((h + 2 * r, w + 2 * r), np.inf)
    padded[r : r + h, r : r + w] = np.where(domain, img, np.inf)
    out = np.full((h, w), np.inf)
    for dy, dx in offsets:
        np.minimum(out, padded[r + dy : r + dy + h, r + dx : r + dx + w], out=out)
    return out


def grey_dilate(img, offsets, domain):
    h, w = img.shape
    r = int(np.abs(offsets).max())
    padded = np.full((h + 2 * r, w + 2 * r), -np.inf)
    padded[r : r + h, r : r + w] = np.where(domain, img, -np.inf)
    out = np.full((h, w), -np.inf)
    for dy, dx in offsets:
        np.maximum(out, padded[r + dy : r + dy + h, r + dx : r + dx + w], out=out)
    return out


def binary_erode(mask, offsets):
    h, w = mask.shape
    r = int(np.abs(offsets).max())
    padded = np.zeros((h + 2 * r, w + 2 * r), dtype=bool)
    padded[r : r + h, r : r + w] = mask
    out = np.ones((h, w), dtype=bool)
    for dy, dx in offsets:
        out &= padded[r + dy : r + dy + h, r + dx : r + dx + w]
    return out


def binary_median(mask, kernel):
    h, w = mask.shape
    half = kernel // 2
    padded = np.pad(mask, half, mode="edge").astype(np.int32)
    # integral image; window sum via inclusion-exclusion
    acc = np.zeros((h + 2 * half + 1, w + 2 * half + 1), dtype=np.int32)
    np.cumsum(padded, axis=0, out=acc[1:, 1:])
    np.cumsum(acc[1:, 1:], axis=1, out=acc[1:, 1:])
    counts = (
        acc[kernel : kernel + h, kernel : kernel + w]
        - acc[:h, kernel : kernel + w]
        - acc[kernel : kernel + h, :w]
        + acc[:h, :w]
    )
    return counts > (kernel * kernel) // 2


def fill_holes(mask):
    return ndi.binary_fill_holes(mask)


def label_components(mask):
    labels, count = ndi.label(mask, structure=_EIGHT)
    if count == 0:
        return labels.astype(np.int32), 0
    # renumber by first raster-scan occurrence; scipy's ordering is not a
    # documented contract, so pin it explicitly
    flat = labels.ravel()
    first = np.full(count + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size, dtype=np.int64))
    order = np.argsort(first[1:], kind="stable")
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[order + 1] = np.arange(1, count + 1, dtype=np.int32)
    return remap[labels], count
