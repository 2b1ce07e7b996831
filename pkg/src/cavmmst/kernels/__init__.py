"""Kernel backend selection: compiled extension if available, numpy fallback.

Set CAVMMST_KERNELS=python (or =compiled) to force a backend; the default
"auto" prefers the compiled extension.
"""

from __future__ import annotations

import os

from . import pykernels

_requested = os.environ.get("CAVMMST_KERNELS", "auto").lower()

_compiled = None
if _requested in ("auto", "compiled"):
    try:
        from . import _cykernels as _compiled
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "CAVMMST_KERNELS=compiled but the extension is not built; "
                "reinstall with a C compiler available")
        _compiled = None

active = _compiled if _compiled is not None else pykernels


def backend_name() -> str:
    return "compiled" if active is not pykernels else "python"


def get_backend(name: str):
    """Explicit backend lookup, used by the benchmark and parity tests."""
    if name == "python":
        return pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    if name == "active":
        return active
    raise ValueError(f"unknown backend {name!r}")
