"""Selects the compiled kernels when built, the numpy fallback otherwise.

Set ``COINREC_PURE=1`` to force the fallback (tests and the benchmark use it
to compare both paths).
"""
import os

import numpy as np

from coinrec import _fallback

BACKEND = "python"
_ext = None
if not os.environ.get("COINREC_PURE"):
    try:
        from coinrec import _kernels as _ext
        BACKEND = "cython"
    except ImportError:
        _ext = None

_impl = _ext if _ext is not None else _fallback


def hough_vote(xs, ys, dx, dy, bounds, counts, backend=None):
    impl = _select(backend)
    impl.hough_vote(
        np.ascontiguousarray(xs, dtype=np.int64),
        np.ascontiguousarray(ys, dtype=np.int64),
        np.ascontiguousarray(dx, dtype=np.int64),
        np.ascontiguousarray(dy, dtype=np.int64),
        np.ascontiguousarray(bounds, dtype=np.int64),
        counts,
    )


def bilinear_sample(img, sx, sy, backend=None):
    impl = _select(backend)
    return impl.bilinear_sample(
        np.ascontiguousarray(img, dtype=np.float64),
        np.ascontiguousarray(sx, dtype=np.float64).reshape(-1),
        np.ascontiguousarray(sy, dtype=np.float64).reshape(-1),
    )


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _fallback
    if backend == "cython":
        if _ext is None:
            raise RuntimeError("compiled kernels are not built")
        return _ext
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    return ["python"] + (["cython"] if _ext is not None else [])
