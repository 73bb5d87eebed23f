"""Cores, orientations and dense subsets of k-uniform hypergraphs.

An ell-orientation assigns every edge to one of its vertices so that no
vertex receives more than ell edges.  It exists iff every vertex set U
spans at most ell*|U| edges, and it is found here as a maximum assignment
in the bipartite graph of edges versus vertices of capacity ell.  Peeling
to the (ell+1)-core first is exact: a vertex of degree <= ell can always
take all of its remaining edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .hypergraph import Hypergraph

__all__ = [
    "CoreReport",
    "DenseWitness",
    "MaximalDenseResult",
    "NotOrientable",
    "Orientation",
    "densest_subset_exact",
    "edges_within",
    "maximal_dense_check",
    "orient",
    "peel_core",
]

MAX_EXACT_N = 24


@dataclass(frozen=True, eq=False)
class CoreReport:
    vertices: np.ndarray
    edge_indices: np.ndarray
    # core degree of each entry of ``vertices``
    degrees: np.ndarray
    density: Fraction
    # vertex that took each peeled edge when it was deleted, -1 inside the core
    edge_owner: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edge_indices)


@dataclass(frozen=True, eq=False)
class Orientation:
    assignment: np.ndarray

    def loads(self, n: int) -> np.ndarray:
        return np.bincount(self.assignment, minlength=n)


@dataclass(frozen=True, eq=False)
class NotOrientable:
    """Hall violator: ``hall_edges`` only use ``witness_vertices`` and
    outnumber ``ell * len(witness_vertices)``."""

    hall_edges: np.ndarray
    witness_vertices: np.ndarray
    ell: int

    @property
    def excess(self) -> int:
        return len(self.hall_edges) - self.ell * len(self.witness_vertices)


@dataclass(frozen=True)
class DenseWitness:
    vertex_set: tuple
    edge_count: int
    density: Fraction
    # edge_count - ell * |vertex_set|
    theta: int


@dataclass(frozen=True)
class MaximalDenseResult:
    dense: bool
    maximal: bool
    theta: int
    violations: list


def _validate_ell(ell) -> int:
    if int(ell) != ell or ell < 1:
        raise ValueError(f"ell must be an integer >= 1, got {ell!r}")
    return int(ell)


def peel_core(h: Hypergraph, ell: int, backend=None) -> CoreReport:
    """The (ell+1)-core: the largest subgraph with minimum degree ell+1.

    Vertices of degree <= ell are deleted in FIFO order together with their
    edges; an edge containing a vertex t times adds t to its degree.
    """
    ell = _validate_ell(ell)
    v_alive, e_alive, owner = kernels.peel(h.edges, h.n, ell, backend=backend)
    verts = np.flatnonzero(v_alive)
    eidx = np.flatnonzero(e_alive)
    deg = np.bincount(h.edges[eidx].ravel(), minlength=h.n)[verts]
    density = Fraction(len(eidx), len(verts)) if len(verts) else Fraction(0)
    return CoreReport(verts, eidx, deg, density, owner)


def _certificate(h: Hypergraph, edge_idx: np.ndarray, ell: int) -> NotOrientable:
    verts = np.unique(h.edges[edge_idx]) if len(edge_idx) else np.empty(0, np.int64)
    cert = NotOrientable(np.asarray(edge_idx, dtype=np.int64), verts, ell)
    if cert.excess <= 0:
        raise AssertionError("Hall certificate does not violate the capacity bound")
    return cert


def _check_orientation(h: Hypergraph, assign: np.ndarray, ell: int) -> None:
    if len(assign) != h.m:
        raise AssertionError("orientation does not cover every edge")
    if h.m == 0:
        return
    if (assign < 0).any() or not (h.edges == assign[:, None]).any(axis=1).all():
        raise AssertionError("an edge is assigned to a vertex outside it")
    if np.bincount(assign, minlength=h.n).max() > ell:
        raise AssertionError("a vertex receives more than ell edges")


def _orient_once(h: Hypergraph, ell: int, core: CoreReport | None, backend):
    if core is not None:
        if core.m > ell * core.n:
            return _certificate(h, core.edge_indices, ell)
        sub = core.edge_indices
        assign = core.edge_owner.copy()
    else:
        sub = np.arange(h.m)
        assign = np.full(h.m, -1, dtype=np.int64)
    a, reach, _ = kernels.match(h.edges[sub], h.n, ell, backend=backend)
    if reach is not None:
        return _certificate(h, sub[reach.astype(bool)], ell)
    assign[sub] = a
    _check_orientation(h, assign, ell)
    return Orientation(assign)


def orient(h: Hypergraph, ell: int, use_core: bool = True, core: CoreReport | None = None, backend=None):
    """Return an :class:`Orientation` or a :class:`NotOrientable` certificate.

    With ``use_core`` the graph is peeled first (or ``core`` is reused) and
    only the core goes through the matching; peeled edges keep the vertex
    that deleted them.  Every result is validated; should the peeled route
    ever produce an invalid one, the whole graph is matched instead.  The
    certificate is the set of edges reachable from an unassigned edge by
    alternating paths, which satisfies |edges| > ell * |their vertices|.
    """
    ell = _validate_ell(ell)
    if not use_core:
        return _orient_once(h, ell, None, backend)
    if core is None:
        core = peel_core(h, ell, backend=backend)
    try:
        return _orient_once(h, ell, core, backend)
    except AssertionError:
        return _orient_once(h, ell, None, backend)


def _edge_masks(h: Hypergraph) -> np.ndarray:
    bits = np.left_shift(np.int64(1), h.edges)
    return np.bitwise_or.reduce(bits, axis=1) if h.m else np.empty(0, np.int64)


def edges_within(h: Hypergraph) -> np.ndarray:
    """``e[S]`` for every vertex bitmask S: the number of edges inside S.

    Exponential in n; subset sums over the per-edge vertex masks.
    """
    if h.n > MAX_EXACT_N:
        raise ValueError(f"exhaustive enumeration needs n <= {MAX_EXACT_N}, got {h.n}")
    f = np.bincount(_edge_masks(h), minlength=1 << h.n).astype(np.int32)
    for i in range(h.n):
        view = f.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return f


def _mask_vertices(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def densest_subset_exact(h: Hypergraph, ell: int) -> DenseWitness | None:
    """Densest vertex set among those with e_U >= ell*|U|, or None.

    Ties go to the smaller set, then to the lexicographically smallest
    sorted vertex tuple.
    """
    ell = _validate_ell(ell)
    if h.n > MAX_EXACT_N:
        raise ValueError(f"exhaustive enumeration needs n <= {MAX_EXACT_N}, got {h.n}")
    if h.n == 0 or h.m == 0:
        return None
    e = edges_within(h).astype(np.int64)
    size = np.bitwise_count(np.arange(1 << h.n, dtype=np.uint32)).astype(np.int64)
    size[0] = 1  # the empty set never qualifies since e[0] = 0
    cand = np.flatnonzero(e >= ell * size)
    cand = cand[cand > 0]
    if not len(cand):
        return None
    # equal rationals with denominators <= 24 give equal doubles and
    # distinct ones distinct doubles, so float comparison is exact here
    dens = e[cand] / size[cand]
    best = cand[dens == dens.max()]
    best = best[size[best] == size[best].min()]
    mask = min((_mask_vertices(int(s)), int(s)) for s in best)[1]
    verts = _mask_vertices(mask)
    count = int(e[mask])
    return DenseWitness(verts, count, Fraction(count, len(verts)), count - ell * len(verts))


def maximal_dense_check(h: Hypergraph, U, ell: int) -> MaximalDenseResult:
    """Is U maximal ell-dense (dense, and dense after adding no single vertex)?

    When the whole hypergraph has density below ell and U is maximal, the
    two structural consequences are verified and any failure is listed in
    ``violations``: ``0 <= theta < ell`` where ``e_U = ell |U| + theta``, and
    every outside vertex lies in fewer than ``ell - theta`` edges whose
    other vertices are all in U.
    """
    ell = _validate_ell(ell)
    inside = np.zeros(h.n, dtype=bool)
    members = np.unique(np.asarray(list(U), dtype=np.int64))
    if not len(members):
        raise ValueError("U must be nonempty")
    inside[members] = True
    v_u = len(members)
    if h.m:
        outside_count = (~inside[h.edges]).sum(axis=1)
    else:
        outside_count = np.empty(0, dtype=np.int64)
    e_u = int((outside_count == 0).sum())
    theta = e_u - ell * v_u
    dense = theta >= 0

    # degree into U of each outside vertex: edges whose only outside vertex is it
    deg_into = np.zeros(h.n, dtype=np.int64)
    if h.m:
        one_out = np.flatnonzero(outside_count > 0)
        rows = h.edges[one_out]
        outs = np.where(inside[rows], -1, rows)
        first = outs.max(axis=1)
        single = (outs == first[:, None]) | (outs < 0)
        single = single.all(axis=1)
        np.add.at(deg_into, first[single], 1)
    out_verts = np.flatnonzero(~inside)
    maximal = dense and bool(
        (e_u + deg_into[out_verts] < ell * (v_u + 1)).all()
    )

    violations = []
    if maximal and h.m < ell * h.n:
        if not 0 <= theta < ell:
            violations.append(f"theta = {theta} outside [0, {ell})")
        bad = out_verts[deg_into[out_verts] >= ell - theta]
        for v in bad.tolist():
            violations.append(f"vertex {v} has degree {int(deg_into[v])} into U, not below {ell - theta}")
    return MaximalDenseResult(dense, maximal, theta, violations)
