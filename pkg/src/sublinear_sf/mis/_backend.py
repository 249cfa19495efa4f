"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``SUBLINEAR_SF_BACKEND=python`` to force the fallback.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _pykernels}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active = "cython" if _compiled is not None else "python"
if os.environ.get("SUBLINEAR_SF_BACKEND", "").lower() == "python":
    _active = "python"


def available() -> list[str]:
    return sorted(_BACKENDS)


def name() -> str:
    return _active


def kernels():
    return _BACKENDS[_active]


def set_backend(backend: str) -> str:
    """Switch the active kernel module; returns the previous name."""
    global _active
    if backend not in _BACKENDS:
        raise ValueError(f"backend {backend!r} unavailable; have {available()}")
    prev, _active = _active, backend
    return prev
