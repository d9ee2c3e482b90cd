"""Kernel backend selection.

The compiled extension is used when it imports cleanly; setting the
environment variable ``OPTSLATER_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def get_kernels(name=None):
    """Return a kernel module by name ("cython" or "python"), or the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_c is None:
            raise ImportError("compiled kernels are not available; build the extension")
        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    return ["python"] + (["cython"] if _kernels_c is not None else [])


if os.environ.get("OPTSLATER_PURE_PYTHON") or _kernels_c is None:
    kernels = _kernels_py
else:
    kernels = _kernels_c

BACKEND = kernels.NAME
