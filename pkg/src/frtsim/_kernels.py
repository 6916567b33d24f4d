"""Flood kernel selection: compiled extension with pure-Python fallback.

The compiled kernel is used when the extension built; set the environment
variable ``FRTSIM_PURE_PYTHON=1`` to force the fallback. Both backends are
bit-identical in their outputs.
"""

from __future__ import annotations

import os

from . import _flood_py

try:
    from . import _speedups
except ImportError:
    _speedups = None


def available_backends() -> tuple[str, ...]:
    return ("python",) if _speedups is None else ("compiled", "python")


def default_backend() -> str:
    if _speedups is None or os.environ.get("FRTSIM_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "compiled"


def flood_kernel(backend: str | None = None):
    b = backend or default_backend()
    if b == "python":
        return _flood_py.flood_arrays
    if b == "compiled":
        if _speedups is None:
            raise RuntimeError("compiled kernel is not available; build the extension or use backend='python'")
        return _speedups.flood_arrays
    raise ValueError(f"unknown kernel backend {backend!r}")
