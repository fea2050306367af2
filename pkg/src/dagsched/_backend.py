"""Kernel backend selection.

The compiled extension (dagsched._kernels) is preferred when it imported
successfully at build time; otherwise the pure-Python twin takes over. Both
expose the same three functions and produce bit-identical results, so the
choice only affects speed. Set DAGSCHED_PURE=1 to force the fallback, e.g.
for benchmarking or to rule the extension out while debugging.
"""

from __future__ import annotations

import os

if os.environ.get("DAGSCHED_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "pure"

prepare_instance = _impl.prepare_instance
evaluate_schedule = _impl.evaluate_schedule
nondominated_ranks = _impl.nondominated_ranks


def backend_name() -> str:
    """Which kernel implementation is active: 'compiled' or 'pure'."""
    return BACKEND
