"""Pure numpy fallback for the compiled reachability kernels.

Semantically identical to the Cython module; selected automatically when
the extension is unavailable (or forced via FEDCOLLAB_BACKEND=python).
"""

from __future__ import annotations

import numpy as np


def update_closure(closure: np.ndarray, j: int, i: int) -> None:
    """Restore exact reachability after inserting the edge j -> i."""
    view = closure.view(np.bool_)
    np.logical_or(view, np.outer(view[:, j], view[i, :]), out=view)


def guard_masks(competing: np.ndarray, closure: np.ndarray,
                i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Conflict guards for the prospective edge j -> i; see the compiled twin."""
    comp = competing.view(np.bool_)
    clo = closure.view(np.bool_)
    reaches_j = clo[:, j]
    from_i = clo[i, :]
    # competes-with-any reductions; competing is symmetric.
    upstream = (comp & reaches_j[np.newaxis, :]).any(axis=1) & from_i
    downstream = (comp & from_i[np.newaxis, :]).any(axis=1) & clo[:, j]
    return upstream, downstream
