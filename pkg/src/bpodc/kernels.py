"""Backend selection for the hot kernels.

The compiled extension is used when it was built; setting
``BPODC_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from . import _fallback

fallback = _fallback
compiled = None

if os.environ.get("BPODC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "python"

ic_spread = _impl.ic_spread
ic_cascade = _impl.ic_cascade
coverage_count = _impl.coverage_count
