"""Kernel backend selection.

The compiled Cython core is used when its extension imports; otherwise
the NumPy fallback takes over. ISOLUME_BACKEND=pure|compiled forces the
choice at import time, and set_backend() switches it at runtime (the
benchmark uses that to compare both).
"""

from __future__ import annotations

import os

from . import pure as _pure

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"pure": _pure}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _initial_backend() -> str:
    forced = os.environ.get("ISOLUME_BACKEND")
    if forced:
        if forced not in ("pure", "compiled"):
            raise RuntimeError(f"ISOLUME_BACKEND must be 'pure' or 'compiled', got {forced!r}")
        if forced not in _BACKENDS:
            raise RuntimeError("ISOLUME_BACKEND=compiled but the extension is not built")
        return forced
    return "compiled" if _compiled is not None else "pure"


_active_name = _initial_backend()


def get_backend() -> str:
    return _active_name


def set_backend(name: str) -> None:
    global _active_name
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active_name = name


def active():
    """The module implementing the current backend's kernels."""
    return _BACKENDS[_active_name]


def backend_module(name: str):
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    return _BACKENDS[name]
