"""Random k-uniform hypergraph models and the plain-text hypergraph format.

Edges are stored as an ``(m, k)`` int64 array with every row sorted.  The
simple models (uniform and binomial) produce distinct vertices within an
edge and distinct edges; the cloning models produce multiset edges and may
repeat edges, and are flagged ``simple=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .numeric import DomainError, X_MAX, _q
from .rng import RandomStream

__all__ = [
    "FormatError",
    "Hypergraph",
    "gen_binomial",
    "gen_cloning",
    "gen_poisson_cloning",
    "gen_uniform",
    "read_hypergraph",
    "sample_trunc_pois",
    "write_hypergraph",
]

MAX_CONSECUTIVE_REJECTIONS = 10**6
MAX_EXPECTED_EDGES = 10**8
# the binomial edge count is sampled in double precision
MAX_SUBSETS = 2**53


class FormatError(ValueError):
    """Malformed hypergraph file."""


@dataclass(frozen=True, eq=False)
class Hypergraph:
    n: int
    k: int
    edges: np.ndarray
    simple: bool = True
    discarded_clones: int = 0

    def __post_init__(self):
        edges = np.ascontiguousarray(self.edges, dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, self.k)
        if edges.ndim != 2 or edges.shape[1] != self.k:
            raise ValueError(f"edges must have shape (m, {self.k}), got {edges.shape}")
        if len(edges) and (edges.min() < 0 or edges.max() >= self.n):
            raise ValueError(f"vertex ids must lie in [0, {self.n})")
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.edges]

    def degrees(self) -> np.ndarray:
        """Vertex degrees counted with occurrence multiplicity."""
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.edges, other.edges)

    __hash__ = None


def _check_nk(n: int, k: int) -> None:
    if int(k) != k or k < 3:
        raise ValueError(f"edge size k must be an integer >= 3, got {k!r}")
    if int(n) != n or n < k:
        raise ValueError(f"need n >= k, got n={n!r}, k={k!r}")


def _check_p(n: int, k: int, p: float) -> int:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")
    total = math.comb(n, k)
    if total > MAX_SUBSETS:
        raise OverflowError(f"C({n},{k}) = {total} exceeds 2**53")
    if p * total > MAX_EXPECTED_EDGES:
        raise ValueError(f"expected edge count {p * total:.3g} exceeds {MAX_EXPECTED_EDGES:g}")
    return total


def _floyd_edges(rs: RandomStream, n: int, k: int, count: int) -> np.ndarray:
    """``count`` independent uniform k-subsets of [0, n), rows sorted.

    Floyd's algorithm run in lockstep over all rows: at step j a value t is
    drawn from [0, j]; if t was already chosen, j is taken instead.
    """
    out = np.empty((count, k), dtype=np.int64)
    for i in range(k):
        j = n - k + i
        t = rs.below(j + 1, count)
        if i:
            taken = (out[:, :i] == t[:, None]).any(axis=1)
            t = np.where(taken, j, t)
        out[:, i] = t
    out.sort(axis=1)
    return out


def _distinct_edges(rs: RandomStream, n: int, k: int, m: int) -> np.ndarray:
    """m distinct uniform k-subsets in order of first appearance.

    Duplicates of earlier edges are dropped and replaced by fresh draws.
    """
    if m == 0:
        return np.empty((0, k), dtype=np.int64)
    edges = _floyd_edges(rs, n, k, m)
    # rows pack into one int64 key when n^k fits; much faster to dedupe
    packed = n**k < 2**63
    weights = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64) if packed else None
    best = 0
    stalled = 0
    while True:
        if packed:
            _, first = np.unique(edges @ weights, return_index=True)
        else:
            _, first = np.unique(edges, axis=0, return_index=True)
        if len(first) == len(edges):
            return edges
        if len(first) > best:
            best, stalled = len(first), 0
        stalled += len(edges) - len(first)
        if stalled >= MAX_CONSECUTIVE_REJECTIONS:
            raise RuntimeError(
                f"{MAX_CONSECUTIVE_REJECTIONS} consecutive duplicate edges while sampling"
            )
        edges = edges[np.sort(first)]
        edges = np.vstack([edges, _floyd_edges(rs, n, k, m - len(edges))])


def gen_uniform(n: int, m: int, k: int, seed) -> Hypergraph:
    """Uniform random simple k-graph on n vertices with m distinct edges."""
    _check_nk(n, k)
    total = math.comb(n, k)
    if int(m) != m or m < 0 or m > total:
        raise ValueError(f"need 0 <= m <= C(n,k) = {total}, got m={m!r}")
    rs = RandomStream(seed)
    return Hypergraph(n, k, _distinct_edges(rs, n, k, int(m)))


def gen_binomial(n: int, p: float, k: int, seed) -> Hypergraph:
    """Each k-subset is an edge independently with probability p.

    The edge count is drawn from Binomial(C(n,k), p), then that many
    distinct uniform k-subsets; this has exactly the binomial-model law.
    """
    _check_nk(n, k)
    total = _check_p(n, k, p)
    rs = RandomStream(seed)
    m = rs.binomial(total, p)
    return Hypergraph(n, k, _distinct_edges(rs, n, k, m))


def _cloning_edges(rs: RandomStream, degrees: np.ndarray, k: int) -> tuple[np.ndarray, int]:
    clones = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    clones = clones[rs.permutation(len(clones))]
    discarded = len(clones) % k
    edges = clones[: len(clones) - discarded].reshape(-1, k)
    edges.sort(axis=1)
    return edges, discarded


def gen_cloning(degrees, k: int, seed) -> Hypergraph:
    """Configuration model: a uniform random k-matching of vertex clones.

    Vertex i gets ``degrees[i]`` clones; the clones are shuffled uniformly
    and cut into consecutive blocks of k.  When the clone total is not a
    multiple of k the trailing clones are left unmatched and counted in
    ``discarded_clones``.
    """
    if int(k) != k or k < 3:
        raise ValueError(f"edge size k must be an integer >= 3, got {k!r}")
    d = np.asarray(degrees)
    if d.ndim != 1 or (d.size and (d.dtype.kind not in "iu" or d.min() < 0)):
        raise ValueError("degrees must be a 1-d sequence of nonnegative integers")
    d = d.astype(np.int64)
    rs = RandomStream(seed)
    edges, discarded = _cloning_edges(rs, d, int(k))
    return Hypergraph(len(d), int(k), edges, simple=False, discarded_clones=discarded)


def gen_poisson_cloning(n: int, p: float, k: int, seed) -> Hypergraph:
    """Cloning model with i.i.d. Poisson(p C(n-1,k-1)) degrees."""
    _check_nk(n, k)
    _check_p(n, k, p)
    lam = p * math.comb(n - 1, k - 1)
    rs = RandomStream(seed)
    d = rs.poisson(lam, n)
    edges, discarded = _cloning_edges(rs, d, int(k))
    return Hypergraph(n, int(k), edges, simple=False, discarded_clones=discarded)


def sample_trunc_pois(lam: float, ell: int, count: int, seed) -> np.ndarray:
    """i.i.d. Poisson(lam) draws conditioned on being at least ell+1.

    Rejection from Poisson(lam); batches are sized by the acceptance
    probability Q(lam, ell+1).
    """
    if not (0.0 < lam <= X_MAX):
        raise DomainError(f"lambda must lie in (0, {X_MAX}], got {lam!r}")
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be an integer >= 1, got {ell!r}")
    if int(count) != count or count < 0:
        raise ValueError(f"count must be a nonnegative integer, got {count!r}")
    accept = _q(float(lam), int(ell) + 1)
    if accept < 1e-6:
        raise DomainError(f"acceptance probability {accept:.3g} too small for rejection sampling")
    rs = RandomStream(seed)
    out = np.empty(0, dtype=np.int64)
    while len(out) < count:
        need = count - len(out)
        batch = rs.poisson(lam, int(need / accept * 1.1) + 16)
        out = np.concatenate([out, batch[batch >= ell + 1][:need]])
    return out


def write_hypergraph(h: Hypergraph, path) -> None:
    """Write ``n m k`` then one sorted edge per line."""
    lines = [f"{h.n} {h.m} {h.k}"]
    lines.extend(" ".join(map(str, row)) for row in np.sort(h.edges, axis=1).tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def parse_hypergraph(text: str, simple: bool = False) -> Hypergraph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append((lineno, [int(tok) for tok in line.split()]))
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer token in {raw!r}") from None
    if not rows:
        raise FormatError("missing header line 'n m k'")
    lineno, header = rows[0]
    if len(header) != 3:
        raise FormatError(f"line {lineno}: header must be 'n m k'")
    n, m, k = header
    if n < 0 or m < 0 or k < 1:
        raise FormatError(f"line {lineno}: invalid header values {header}")
    body = rows[1:]
    if len(body) != m:
        raise FormatError(f"header declares {m} edges, found {len(body)}")
    for lineno, row in body:
        if len(row) != k:
            raise FormatError(f"line {lineno}: expected {k} vertex ids, got {len(row)}")
        if min(row) < 0 or max(row) >= n:
            raise FormatError(f"line {lineno}: vertex id outside [0, {n})")
    edges = np.array([row for _, row in body], dtype=np.int64).reshape(m, k)
    edges.sort(axis=1)
    return Hypergraph(n, k, edges, simple=simple)


def read_hypergraph(path) -> Hypergraph:
    """Parse the text format written by :func:`write_hypergraph`.

    ``simple`` is set when no edge repeats a vertex and no edge repeats.
    """
    h = parse_hypergraph(Path(path).read_text())
    e = h.edges
    simple = bool(
        (e.shape[1] < 2 or (np.diff(e, axis=1) > 0).all())
        and len(np.unique(e, axis=0)) == len(e)
    )
    return Hypergraph(h.n, h.k, e, simple=simple)
