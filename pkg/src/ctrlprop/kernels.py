"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Set ``CTRLPROP_KERNELS=python`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("CTRLPROP_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def use_backend(name):
    """Switch backend at runtime (benchmarks and tests compare both)."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _kernels_py, "python"
    elif name == "cython":
        from . import _kernels as compiled

        _impl, BACKEND = compiled, "cython"
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def apply_local(m, g, left, right):
    return _impl.apply_local(_c(m), _c(g), int(left), int(right))


def kron(a, b):
    return _impl.kron(_c(a), _c(b))


def controlled(u):
    return _impl.controlled(_c(u))


def max_abs_diff(a, b):
    a, b = _c(a), _c(b)
    if a.size == 0:
        return 0.0
    return float(_impl.max_abs_diff(a, b))
