"""Hot-loop kernels with two interchangeable backends.

The numba backend compiles the loops with @njit; the numpy backend runs
vectorized equivalents. Selection happens once at import time via the
POLARSCORE_KERNELS environment variable: "auto" (default; numba when
importable), "numba", or "numpy". ``benchmarks/bench_kernels.py`` times the
two side by side.
"""

import os

_choice = os.environ.get("POLARSCORE_KERNELS", "auto").lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"POLARSCORE_KERNELS must be auto, numba, or numpy (got {_choice!r})"
    )

if _choice == "numpy":
    from . import numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from . import numpy_impl as _impl

        BACKEND = "numpy"

sgns_train_epoch = _impl.sgns_train_epoch
walk_hitting_times = _impl.walk_hitting_times
mutual_reachability_mst = _impl.mutual_reachability_mst
layout_optimize = _impl.layout_optimize

__all__ = [
    "BACKEND",
    "sgns_train_epoch",
    "walk_hitting_times",
    "mutual_reachability_mst",
    "layout_optimize",
]
