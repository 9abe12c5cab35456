"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``UAPPROX_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

fallback = _fallback
compiled = None

if os.environ.get("UAPPROX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

kernels = compiled if compiled is not None else fallback
name = "cython" if compiled is not None else "python"


def use(which: str) -> None:
    """Switch the active kernels at runtime ("cython" or "python")."""
    global kernels, name
    if which == "python":
        kernels, name = fallback, "python"
    elif which == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        kernels, name = compiled, "cython"
    else:
        raise ValueError(which)
