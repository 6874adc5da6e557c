"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback
is used. ``DECORR_BACKEND=python`` forces the fallback and
``DECORR_BACKEND=compiled`` makes a missing extension an import error.
"""

import os

from . import _purepy

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

_BACKENDS = {"python": _purepy}
if _kernels is not None:
    _BACKENDS["compiled"] = _kernels


def available():
    """Names of the importable backends, compiled first."""
    return sorted(_BACKENDS, key=lambda name: name != "compiled")


def get(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available()}") from None


def _select():
    forced = os.environ.get("DECORR_BACKEND", "").strip().lower()
    if forced == "compiled" and _kernels is None:
        raise ImportError("DECORR_BACKEND=compiled but decorr._kernels is not built")
    if forced:
        return get(forced)
    return _kernels if _kernels is not None else _purepy


active = _select()
