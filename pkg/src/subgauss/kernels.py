"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``SUBGAUSS_PURE_PYTHON=1`` forces the fallback.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from subgauss import _pykernels

_FUNCS = ("psi2_rows", "linear_values", "linear_psi2", "hom_values", "hom_psi2",
          "edge_terms", "delta_vertex")


def _load_compiled():
    try:
        from subgauss import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()

if _compiled is not None and not os.environ.get("SUBGAUSS_PURE_PYTHON"):
    _impl = _compiled
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "python"


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name):
    """Module implementing the kernels for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def default_threads():
    try:
        return max(1, int(os.environ.get("SUBGAUSS_THREADS", "1")))
    except ValueError:
        return 1


def map_masks(fn, masks, threads=None, **kwargs):
    """Apply a per-mask kernel over ``masks`` split into contiguous partitions.

    Partitions are merged in ascending order, and every mask is computed
    independently, so the result does not depend on ``threads``.
    """
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    threads = threads or default_threads()
    if threads <= 1 or masks.shape[0] < 2 * threads:
        return fn(masks=masks, **kwargs)
    parts = np.array_split(masks, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda part: fn(masks=part, **kwargs), parts))
    return np.concatenate(results, axis=0)


psi2_rows = _impl.psi2_rows
linear_values = _impl.linear_values
linear_psi2 = _impl.linear_psi2
hom_values = _impl.hom_values
hom_psi2 = _impl.hom_psi2
edge_terms = _impl.edge_terms
delta_vertex = _impl.delta_vertex
