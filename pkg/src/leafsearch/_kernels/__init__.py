"""Kernel backend selection.

The hot per-pixel loops (grayscale morphology, binary median, hole
filling, connected-component labeling) exist twice: a compiled Cython
extension and a NumPy/SciPy reference. The compiled backend is chosen at
import time when available.

Set ``LEAFSEARCH_KERNELS`` to force a backend:

* ``auto`` (default): compiled if built, else pure Python
* ``compiled``: require the extension, raise if missing
* ``python``: always use the reference implementation
"""

import os

from . import _reference

try:
    from . import _native
except ImportError:
    _native = None

_requested = os.environ.get("LEAFSEARCH_KERNELS", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise ValueError(
        f"LEAFSEARCH_KERNELS must be auto, compiled, or python, not {_requested!r}"
    )
if _requested == "compiled" and _native is None:
    raise ImportError(
        "LEAFSEARCH_KERNELS=compiled but the leafsearch._kernels._native "
        "extension is not built (run: pip install -e . --no-build-isolation)"
    )

_impl = _reference if (_requested == "python" or _native is None) else _native

BACKEND = "python" if _impl is _reference else "compiled"

grey_erode = _impl.grey_erode
grey_dilate = _impl.grey_dilate
binary_erode = _impl.binary_erode
binary_median = _impl.binary_median
fill_holes = _impl.fill_holes
label_components = _impl.label_components
