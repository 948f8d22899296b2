"""Integration-kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise
the pure-numpy fallback takes over.  Setting ``SYNCGAIN_PURE_PYTHON=1``
forces the fallback (used by the benchmark and the cross-backend tests).
Both backends walk identical grids and produce matching samples up to
floating-point summation order.
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_python = os.environ.get("SYNCGAIN_PURE_PYTHON", "").strip() not in ("", "0")

if _force_python:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

rk4_path = _impl.rk4_path
propagate_path = _impl.propagate_path


def backend_name() -> str:
    """Name of the active kernel backend, ``"cython"`` or ``"python"``."""
    return BACKEND
