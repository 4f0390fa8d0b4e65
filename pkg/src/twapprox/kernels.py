"""Kernel selector: compiled extension when importable, pure Python otherwise.

Set TWAPPROX_PURE=1 to force the fallback.
"""

import os

from . import _kernels_py as py
from ._kernels_py import NodeBudgetExceeded

_INT64_MAX = (1 << 63) - 1

native = None
if not os.environ.get("TWAPPROX_PURE"):
    try:
        from . import _kernels as native
    except ImportError:  # extension not built
        native = None

impl = native if native is not None else py
BACKEND = impl.BACKEND

zone_column = impl.zone_column
row_corners = impl.row_corners


def mis_bnb(n, adj, weights, budget):
    """Dispatch on weight magnitude: the compiled search works on int64 sums."""
    if native is not None and sum(weights) < _INT64_MAX and min(weights, default=0) > -_INT64_MAX:
        return native.mis_bnb(n, adj, weights, budget)
    return py.mis_bnb(n, adj, weights, budget)


__all__ = ["zone_column", "row_corners", "mis_bnb", "NodeBudgetExceeded", "BACKEND", "native", "py"]
