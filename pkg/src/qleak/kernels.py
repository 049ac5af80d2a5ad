"""Kernel backend selection.

Prefers the compiled extension and falls back to the numpy implementation
when it is missing. QLEAK_KERNELS=python|cython forces a backend; forcing
cython raises if the extension was never built.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("QLEAK_KERNELS", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
elif _requested == "cython":
    from . import _kernels as _impl  # ImportError here means no built extension
elif _requested == "auto":
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
else:
    raise ValueError(f"QLEAK_KERNELS must be auto, python or cython, "
                     f"got {_requested!r}")

BACKEND = _impl.BACKEND
apply_1q = _impl.apply_1q
apply_cx = _impl.apply_cx
apply_cz = _impl.apply_cz
apply_swap = _impl.apply_swap
apply_ccx = _impl.apply_ccx
