"""Hot-kernel dispatch.

The jitted backend is the default. Set ``EVOSEG_BACKEND=numpy`` to force the
pure-numpy fallback (e.g. on machines without a working numba), or
``EVOSEG_BACKEND=numba`` to fail loudly when numba is unavailable. Both
backends are bit-identical; only speed differs.
"""

import contextlib
import ctypes
import importlib
import os

_KERNELS = (
    "erode_u8",
    "dilate_u8",
    "median_u8",
    "window_max_f64",
    "sep_convolve_f64",
    "sep_convolve_u8",
    "conv3x3_i32",
    "edt_f64",
    "label_8",
    "priority_flood",
    "greedy_select",
    "hough_votes",
)

ENV_VAR = "EVOSEG_BACKEND"

active_backend = None


def _load(name):
    return importlib.import_module(f"{__name__}.{name}_backend")


def _bind(name):
    global active_backend
    impl = _load(name)
    for fn in _KERNELS:
        globals()[fn] = getattr(impl, fn)
    active_backend = name


def use_backend(name):
    """Rebind all kernels to the named backend ('numba' or 'numpy')."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    _bind(name)


@contextlib.contextmanager
def backend(name):
    """Temporarily switch backends (used by the comparison benchmark)."""
    previous = active_backend
    use_backend(name)
    try:
        yield
    finally:
        use_backend(previous)


def _tune_malloc():
    """Raise glibc's mmap/trim thresholds so the multi-MB scratch arrays the
    kernels allocate per call are served from the heap free list instead of
    fresh mmap/munmap cycles (which cost ~1 ms per call at 512x512). No-op on
    non-glibc platforms; disable with EVOSEG_NO_MALLOC_TUNING=1."""
    if os.environ.get("EVOSEG_NO_MALLOC_TUNING"):
        return
    try:
        libc = ctypes.CDLL("libc.so.6")
        m_trim_threshold, m_mmap_threshold = -1, -3
        libc.mallopt(m_mmap_threshold, 64 * 1024 * 1024)
        libc.mallopt(m_trim_threshold, 64 * 1024 * 1024)
    except (OSError, AttributeError):
        pass


def _init():
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise RuntimeError(f"{ENV_VAR} must be 'numba' or 'numpy', got {requested!r}")
    _tune_malloc()
    if requested == "numpy":
        _bind("numpy")
        return
    try:
        _bind("numba")
    except ImportError:
        if requested == "numba":
            raise
        _bind("numpy")


_init()
