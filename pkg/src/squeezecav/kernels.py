"""Backend selection for the hot kernels.

The compiled extension is preferred when importable; otherwise the pure
NumPy implementation is used.  Set SQUEEZECAV_BACKEND=python or =compiled
to force a choice (the latter raises if the extension is missing).
"""

import os

_forced = os.environ.get("SQUEEZECAV_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _kernels_py as _impl
elif _forced == "compiled":
    from . import _kernels_cy as _impl  # type: ignore[attr-defined]
elif _forced:
    raise ImportError(f"unknown SQUEEZECAV_BACKEND={_forced!r}")
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = "compiled" if _impl.__name__.endswith("_cy") else "python"

U_MAX = _impl.U_MAX
sts_evolve = _impl.sts_evolve
lindblad_rhs = _impl.lindblad_rhs
lindblad_evolve = _impl.lindblad_evolve


def backend_name():
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return BACKEND
