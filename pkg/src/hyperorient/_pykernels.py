"""Pure-Python peeling and capacitated matching.

Reference implementation of the compiled kernels in ``_kernels.pyx``; both
take and return the same arrays and must agree exactly.
"""

from __future__ import annotations

from collections import deque

import numpy as np

INF = 1 << 62


def peel(edges: np.ndarray, indptr: np.ndarray, inc: np.ndarray, n: int, ell: int):
    """Delete vertices of degree <= ell (FIFO) until none is left.

    ``inc[indptr[v]:indptr[v+1]]`` lists the edges containing v, once per
    occurrence.  Returns ``(vertex_alive, edge_alive, edge_owner)``; an edge
    removed with vertex v gets owner v, and each vertex owns at most ell
    edges.
    """
    m = len(edges)
    rows = edges.tolist()
    ptr = indptr.tolist()
    incl = inc.tolist()
    deg = [ptr[v + 1] - ptr[v] for v in range(n)]
    v_alive = [1] * n
    e_alive = [1] * m
    owner = [-1] * m
    queued = [0] * n
    queue = deque()
    for v in range(n):
        if deg[v] <= ell:
            queued[v] = 1
            queue.append(v)
    while queue:
        v = queue.popleft()
        v_alive[v] = 0
        for i in range(ptr[v], ptr[v + 1]):
            e = incl[i]
            if not e_alive[e]:
                continue
            e_alive[e] = 0
            owner[e] = v
            for u in rows[e]:
                deg[u] -= 1
                if deg[u] <= ell and not queued[u]:
                    queued[u] = 1
                    queue.append(u)
    return (
        np.array(v_alive, dtype=np.uint8),
        np.array(e_alive, dtype=np.uint8),
        np.array(owner, dtype=np.int64),
    )


def match(links: np.ndarray, indptr: np.ndarray, inc: np.ndarray, n: int, ell: int):
    """Maximum assignment of edges to member vertices, at most ell per vertex.

    ``links`` is the ``(m, k)`` edge array with repeated vertices inside a
    row replaced by -1, and ``inc``/``indptr`` the matching incidence lists
    (one entry per distinct (edge, vertex) pair).  Shortest augmenting
    paths are found in phases: a BFS layers the edges by distance from the
    unassigned ones, then a DFS with current-arc pointers augments along
    layered paths.

    Returns ``(assign, reach, phases)``.  ``assign[e]`` is the vertex of
    edge e or -1.  When some edge stays unassigned, ``reach`` marks the
    edges reachable from unassigned edges by alternating paths (a Hall
    violator), otherwise it is None.
    """
    m = len(links)
    rows = [[v for v in row if v >= 0] for row in links.tolist()]
    ptr = indptr.tolist()
    incl = inc.tolist()
    assign = [-1] * m
    load = [0] * n

    for e in range(m):
        for v in rows[e]:
            if load[v] < ell:
                assign[e] = v
                load[v] += 1
                break

    dist = [INF] * m
    # layer of the edges currently assigned to a full vertex
    vlayer = [INF] * n
    phases = 0
    while True:
        phases += 1
        # BFS layering from all unassigned edges
        for e in range(m):
            dist[e] = INF
        for v in range(n):
            vlayer[v] = INF
        queue = deque()
        for e in range(m):
            if assign[e] < 0:
                dist[e] = 0
                queue.append(e)
        if not queue:
            return np.array(assign, dtype=np.int64), None, phases
        limit = INF
        while queue:
            e = queue.popleft()
            d = dist[e]
            if d > limit:
                break
            for v in rows[e]:
                if v == assign[e] or vlayer[v] != INF:
                    continue
                if load[v] < ell:
                    limit = d
                    continue
                vlayer[v] = d + 1
                for i in range(ptr[v], ptr[v + 1]):
                    f = incl[i]
                    if assign[f] == v and dist[f] == INF:
                        dist[f] = d + 1
                        queue.append(f)
        if limit == INF:
            reach = np.array([d < INF for d in dist], dtype=np.uint8)
            return np.array(assign, dtype=np.int64), reach, phases

        # DFS along layered paths
        e_ptr = [0] * m
        v_ptr = ptr[:-1]
        for root in range(m):
            if assign[root] >= 0 or dist[root] != 0:
                continue
            stack = [root]
            via = []
            while stack:
                e = stack[-1]
                row = rows[e]
                pushed = False
                while e_ptr[e] < len(row):
                    v = row[e_ptr[e]]
                    if v == assign[e]:
                        e_ptr[e] += 1
                        continue
                    if load[v] < ell:
                        # augment: shift every edge on the path one step
                        load[v] += 1
                        target = v
                        for j in range(len(stack) - 1, -1, -1):
                            f = stack[j]
                            assign[f] = target
                            dist[f] = INF
                            if j:
                                target = via[j - 1]
                        stack = []
                        pushed = True
                        break
                    # v's pointer is only ever advanced from the layer below it
                    if vlayer[v] != dist[e] + 1:
                        e_ptr[e] += 1
                        continue
                    end = ptr[v + 1]
                    while v_ptr[v] < end:
                        f = incl[v_ptr[v]]
                        if assign[f] == v and dist[f] == vlayer[v]:
                            break
                        v_ptr[v] += 1
                    if v_ptr[v] < end:
                        stack.append(incl[v_ptr[v]])
                        via.append(v)
                        pushed = True
                        break
                    e_ptr[e] += 1
                if not pushed:
                    dist[e] = INF
                    stack.pop()
                    if via:
                        via.pop()
