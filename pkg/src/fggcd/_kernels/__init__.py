"""Kernel backend selection.

Prefers the compiled extension (built from ``_fast.pyx``) and falls back to
the NumPy implementations when it is absent. Set ``FGGCD_PURE_PYTHON=1`` to
force the fallback regardless of what is installed.
"""

import os

if os.environ.get("FGGCD_PURE_PYTHON"):
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl

        BACKEND = "pure"

scatter_add_rows = _impl.scatter_add_rows
scatter_add_vec = _impl.scatter_add_vec
clipped_edge_dot_sums = _impl.clipped_edge_dot_sums

__all__ = ["BACKEND", "scatter_add_rows", "scatter_add_vec", "clipped_edge_dot_sums"]
