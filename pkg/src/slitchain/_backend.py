"""Kernel backend selection: compiled extension if available, numpy otherwise.

``SLITCHAIN_BACKEND=python`` forces the numpy fallback (used by the
benchmark); ``SLITCHAIN_BACKEND=compiled`` fails loudly when the extension
is missing instead of falling back silently.
"""

from __future__ import annotations

import os

_choice = os.environ.get("SLITCHAIN_BACKEND", "auto").lower()

if _choice == "python":
    from . import _kernels_py as kernels
elif _choice == "compiled":
    from . import _kernels as kernels  # ImportError here is intentional
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _kernels_py as kernels

advect_x = kernels.advect_x
kick_w = kernels.kick_w
COMPILED = kernels.COMPILED
