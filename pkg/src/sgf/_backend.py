"""Kernel backend selection.

The per-frame numeric kernels exist twice: a numba ``@njit`` build and a
pure-numpy build. ``SGF_BACKEND=numpy`` or ``SGF_BACKEND=numba`` forces one;
by default numba is used whenever it imports cleanly.
"""

import os

_requested = os.environ.get("SGF_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"SGF_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    HAS_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError("SGF_BACKEND=numba but numba is not importable")
        HAS_NUMBA = False


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return "numba" if HAS_NUMBA else "numpy"
