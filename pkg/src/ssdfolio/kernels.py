"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
versions are loaded. Set ``SSDFOLIO_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SSDFOLIO_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"

simplex_iterate = _impl.simplex_iterate
lpm_profile = _impl.lpm_profile
grid_best = _impl.grid_best

OPTIMAL = _kernels_py.OPTIMAL
UNBOUNDED = _kernels_py.UNBOUNDED
ITERATION_LIMIT = _kernels_py.ITERATION_LIMIT
AT_LOWER = _kernels_py.AT_LOWER
AT_UPPER = _kernels_py.AT_UPPER
BASIC = _kernels_py.BASIC
