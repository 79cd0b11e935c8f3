"""Optional numba acceleration.

Hot kernels in :mod:`adaknn._kernels` are compiled with ``@njit`` when numba
is importable and the environment variable ``ADAKNN_DISABLE_NUMBA`` is unset
(or set to ``0``). Otherwise the decorators below degrade to no-ops and the
library routes every call through the pure-numpy fallback implementations.
"""

import os

DISABLE_ENV = "ADAKNN_DISABLE_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "0").strip().lower() not in ("", "0", "false", "no")


try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via subprocess in tests
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and not _disabled_by_env()

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):  # noqa: F811 - intentional fallback shadow
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap

    def prange(*args):  # noqa: F811
        return range(*args)


def set_thread_count(threads: int) -> None:
    """Bound the number of worker threads used by compiled kernels.

    A no-op on the numpy fallback path, which is single threaded. Results
    are identical for any thread count.
    """
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    if NUMBA_ENABLED:
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
