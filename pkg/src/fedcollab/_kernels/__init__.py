"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; set
FEDCOLLAB_BACKEND=python to force the numpy fallback (used by the
benchmark and the backend-equivalence tests). Both backends are
bit-for-bit equivalent.
"""

from __future__ import annotations

import os

from . import _closure_py

BACKEND = "python"
update_closure = _closure_py.update_closure
guard_masks = _closure_py.guard_masks

if os.environ.get("FEDCOLLAB_BACKEND", "").lower() not in ("python", "py"):
    try:
        from . import _closure  # type: ignore[attr-defined]

        BACKEND = "cython"
        update_closure = _closure.update_closure
        guard_masks = _closure.guard_masks
    except ImportError:
        pass

__all__ = ["BACKEND", "update_closure", "guard_masks"]
