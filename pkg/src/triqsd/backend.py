"""Kernel backend selection: numba-compiled loops with a pure-numpy fallback.

The hot inner loops (noise scans, per-trajectory RK4) exist in two
implementations.  By default the numba one is used when numba imports;
setting the environment variable ``TRIQSD_DISABLE_NUMBA`` to ``1``/``true``
forces the vectorized numpy path.  ``active_backend()`` reports which one
is live so runs can record it in their metadata.
"""

import os

_ENV_FLAG = "TRIQSD_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    if _env_disabled():
        raise ImportError("numba disabled via %s" % _ENV_FLAG)
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # pragma: no cover - trivial passthrough
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def active_backend() -> str:
    """Name of the kernel implementation in use: ``"numba"`` or ``"numpy"``."""
    return "numba" if HAS_NUMBA else "numpy"
