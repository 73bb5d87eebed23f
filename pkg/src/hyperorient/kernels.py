"""Backend selection for the peeling and matching kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``HYPERORIENT_PURE`` is set to ``1``, the pure-Python
reference implementation is used.  ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("HYPERORIENT_PURE", "") != "1":
    _active = _compiled
    BACKEND = "compiled"
else:
    _active = _pykernels
    BACKEND = "python"

__all__ = ["BACKEND", "available_backends", "distinct_links", "incidence", "match", "peel"]


def available_backends() -> dict:
    out = {"python": _pykernels}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def _module(backend):
    if backend is None:
        return _active
    try:
        return available_backends()[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} is not available") from None


def incidence(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR incidence lists ``(indptr, inc)``: the edges containing vertex v
    are ``inc[indptr[v]:indptr[v+1]]`` in increasing order, one entry per
    occurrence; negative entries of ``edges`` are skipped."""
    m, k = edges.shape
    flat = edges.ravel()
    keep = np.flatnonzero(flat >= 0)
    verts = flat[keep]
    order = np.argsort(verts, kind="stable")
    inc = (keep[order] // k).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(verts, minlength=n), out=indptr[1:])
    return indptr, inc


def distinct_links(edges: np.ndarray) -> np.ndarray:
    """Copy of ``edges`` with repeated vertices inside a row replaced by -1."""
    links = np.array(edges, dtype=np.int64, copy=True)
    if links.size == 0:
        return links
    s = np.sort(links, axis=1)
    if (s[:, 1:] != s[:, :-1]).all():
        return links
    for j in range(1, links.shape[1]):
        dup = (links[:, :j] == links[:, j : j + 1]).any(axis=1)
        links[dup, j] = -1
    return links


def peel(edges: np.ndarray, n: int, ell: int, backend=None):
    """See :func:`hyperorient._pykernels.peel`."""
    edges = np.ascontiguousarray(edges, dtype=np.int64)
    indptr, inc = incidence(edges, n)
    return _module(backend).peel(edges, indptr, inc, int(n), int(ell))


def match(edges: np.ndarray, n: int, ell: int, backend=None):
    """See :func:`hyperorient._pykernels.match`."""
    links = np.ascontiguousarray(distinct_links(edges))
    indptr, inc = incidence(links, n)
    return _module(backend).match(links, indptr, inc, int(n), int(ell))
