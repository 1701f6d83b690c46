"""Batched feasibility kernel with selectable backend.

``batch_feasible(segs, tx, ty, R, th_s, th_c, rr, eps)`` evaluates many
(theta_S, theta_C, r) trajectories against one scene's segment array and
returns a boolean mask.  The backend is chosen once at import time from
the ``PROBEPLAN_NUMBA`` environment variable:

* ``"0"`` -- pure-numpy broadcast implementation,
* ``"1"`` -- numba JIT implementation (ImportError if numba is missing),
* unset  -- numba when importable, numpy otherwise.
"""

import os

_flag = os.environ.get("PROBEPLAN_NUMBA", "").strip()

if _flag == "0":
    from .numpy_impl import batch_feasible

    _BACKEND = "numpy"
elif _flag == "1":
    from .numba_impl import batch_feasible

    _BACKEND = "numba"
else:
    try:
        from .numba_impl import batch_feasible

        _BACKEND = "numba"
    except ImportError:
        from .numpy_impl import batch_feasible

        _BACKEND = "numpy"


def backend_name():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return _BACKEND


__all__ = ["batch_feasible", "backend_name"]
