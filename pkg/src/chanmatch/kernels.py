"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting ``CHANMATCH_PURE=1``
forces the numpy fallback.
"""
import os

from . import _kernels_py

if os.environ.get("CHANMATCH_PURE") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

channel_from_labels = _impl.channel_from_labels
reclassify = _impl.reclassify
