"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twin. Set ``COMFORTGRAPH_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import importlib
import logging
import os
from types import ModuleType

logger = logging.getLogger(__name__)


def load(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` ("compiled" or "python")."""
    if name == "python":
        return importlib.import_module("comfortgraph._pykernels")
    try:
        return importlib.import_module("comfortgraph._core")
    except ImportError:
        if name == "compiled":
            raise
        logger.warning("compiled kernels unavailable; using the pure-Python fallback")
        return importlib.import_module("comfortgraph._pykernels")


kernels = load(os.environ.get("COMFORTGRAPH_BACKEND") or None)
