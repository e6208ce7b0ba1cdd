"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
versions are used.  Set ``COVERT_ROUTE_PURE=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"

if os.environ.get("COVERT_ROUTE_PURE", "") != "1":
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback
    else:
        BACKEND = "compiled"
else:
    _impl = _fallback

exposure_matrix = _impl.exposure_matrix
dense_dijkstra = _impl.dense_dijkstra

__all__ = ["BACKEND", "exposure_matrix", "dense_dijkstra"]
