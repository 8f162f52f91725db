"""Precomputation kernels with a compiled fast path.

The Cython module is used when it was built; otherwise the numpy fallback
is imported.  Setting ``OPSBD_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("OPSBD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
los_batch = _impl.los_batch
astar = _impl.astar
chord_sums = _impl.chord_sums
dominance_counts = _impl.dominance_counts


def available_backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
