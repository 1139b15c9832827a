"""Kernel selection.

The compiled ``_core`` extension is preferred. Setting ``GRAPHSEG_PURE=1``
in the environment, or a failed build, selects the numpy/pure-Python
``_pure`` module instead. Both expose the same functions.
"""
import importlib
import os

from . import _pure


def _load_core():
    try:
        return importlib.import_module("graphseg._core")
    except ImportError:
        return None


_core = _load_core()

if os.environ.get("GRAPHSEG_PURE", "") not in ("", "0") or _core is None:
    kernels = _pure
else:
    kernels = _core


def available():
    """Names of the kernel backends importable in this environment."""
    return ["core", "pure"] if _core is not None else ["pure"]


def get(name=None):
    """Return the kernel module called ``name``, or the active one."""
    if name is None:
        return kernels
    if name == "pure":
        return _pure
    if name == "core":
        if _core is None:
            raise ImportError("graphseg._core is not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")
