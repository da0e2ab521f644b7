"""Kernel selection: the compiled core when importable, else the pure-Python one.

Set ``COMMITORDER_PURE=1`` to force the fallback.
"""

import os

from . import _pycore

HAVE_CORE = False
if os.environ.get("COMMITORDER_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        _core = None
    else:
        HAVE_CORE = True
else:
    _core = None

_impl = _core if HAVE_CORE else _pycore

pivot = _impl.pivot
bland_step = _impl.bland_step
tally = _impl.tally
normalize = _pycore.normalize


def use(kind: str) -> None:
    """Switch kernels at runtime (``"core"`` or ``"python"``); for benchmarks and tests."""
    global pivot, bland_step, tally, _impl
    if kind == "core":
        if _core is None:
            raise RuntimeError("compiled core is not available")
        _impl = _core
    elif kind == "python":
        _impl = _pycore
    else:
        raise ValueError(kind)
    pivot = _impl.pivot
    bland_step = _impl.bland_step
    tally = _impl.tally


def active() -> str:
    return "core" if _impl is not _pycore else "python"
