"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels.  Set
``REESDENSITY_PURE_PYTHON=1`` to force the fallback (useful for benchmarking
and for verifying backend agreement).
"""

from __future__ import annotations

import os

if os.environ.get("REESDENSITY_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.backend_name()

minimalize_exponents = _impl.minimalize_exponents
product_exponents = _impl.product_exponents
intersect_exponents = _impl.intersect_exponents
divides_any = _impl.divides_any
