"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Both produce identical numbers, so switching only affects speed.
"""
from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active = _BACKENDS.get("cython", _kernels_py)


def available_backends():
    return sorted(_BACKENDS)


def get_backend() -> str:
    return "cython" if _active is _compiled and _compiled is not None else "python"


def set_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} not available; choose from {available_backends()}"
        ) from None


def kernels():
    return _active
