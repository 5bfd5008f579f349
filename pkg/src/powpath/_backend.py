"""Kernel selection.

The compiled kernel is used when it imports; otherwise the pure-Python one.
``POWPATH_BACKEND=python`` (or ``cython``) forces a choice.
"""

from __future__ import annotations

import logging
import os
from types import ModuleType

from . import _pykernel

log = logging.getLogger(__name__)

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

AVAILABLE: dict[str, ModuleType] = {"python": _pykernel}
if _ckernel is not None:
    AVAILABLE["cython"] = _ckernel


def get_kernel(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` (``None`` means the default)."""
    if name is None:
        return kernel
    try:
        return AVAILABLE[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(AVAILABLE)}") from None


def _select() -> tuple[str, ModuleType]:
    wanted = os.environ.get("POWPATH_BACKEND", "auto").lower()
    if wanted == "auto":
        name = "cython" if "cython" in AVAILABLE else "python"
        if name == "python":
            log.warning("compiled kernel not built; using the slow pure-Python fallback")
        return name, AVAILABLE[name]
    return wanted, get_kernel(wanted)


BACKEND, kernel = _select()
