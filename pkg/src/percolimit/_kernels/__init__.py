"""Kernel backend selection.

The compiled backend is used when its extension module imported cleanly;
otherwise the pure-Python reference implementation takes over.  Both expose
the same functions with the same draw protocol, so outputs are bit-identical
for a given generator state.  Set ``PERCOLIMIT_BACKEND=py`` or ``=c`` to
force a choice (forcing ``c`` raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from . import _pykern

_forced = os.environ.get("PERCOLIMIT_BACKEND", "").strip().lower()
if _forced not in ("", "c", "py"):
    raise ImportError(
        f"PERCOLIMIT_BACKEND must be 'c' or 'py', got {_forced!r}")

_impl = None
if _forced in ("", "c"):
    try:
        from . import _ckern as _impl
    except ImportError:
        if _forced == "c":
            raise
        _impl = None
if _impl is None:
    _impl = _pykern

BACKEND = "c" if _impl is not _pykern else "py"

MODE_COND = _pykern.MODE_COND
MODE_LEFT = _pykern.MODE_LEFT
MODE_RIGHT = _pykern.MODE_RIGHT
STATUS_RUNNING = _pykern.STATUS_RUNNING
STATUS_STOPPED = _pykern.STATUS_STOPPED
STATUS_EXHAUSTED = _pykern.STATUS_EXHAUSTED

gw_walk = _impl.gw_walk
sin_walk = _impl.sin_walk
invade_walk = _impl.invade_walk
sde_path = _impl.sde_path
sde_block_many = _impl.sde_block_many

__all__ = [
    "BACKEND",
    "MODE_COND", "MODE_LEFT", "MODE_RIGHT",
    "STATUS_RUNNING", "STATUS_STOPPED", "STATUS_EXHAUSTED",
    "gw_walk", "sin_walk", "invade_walk", "sde_path", "sde_block_many",
]
