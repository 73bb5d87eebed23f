# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled peeling and capacitated matching (see _pykernels for the reference)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64

cdef i64 INF = (<i64>1) << 62


def peel(i64[:, ::1] edges, i64[::1] indptr, i64[::1] inc, i64 n, i64 ell):
    cdef i64 m = edges.shape[0], k = edges.shape[1]
    cdef i64 v, u, e, i, j, head = 0, tail = 0
    deg_a = np.diff(indptr)
    v_alive_a = np.ones(n, dtype=np.uint8)
    e_alive_a = np.ones(m, dtype=np.uint8)
    owner_a = np.full(m, -1, dtype=np.int64)
    queued_a = np.zeros(n, dtype=np.uint8)
    queue_a = np.empty(n, dtype=np.int64)
    cdef i64[::1] deg = deg_a
    cdef cnp.uint8_t[::1] v_alive = v_alive_a
    cdef cnp.uint8_t[::1] e_alive = e_alive_a
    cdef i64[::1] owner = owner_a
    cdef cnp.uint8_t[::1] queued = queued_a
    cdef i64[::1] queue = queue_a

    for v in range(n):
        if deg[v] <= ell:
            queued[v] = 1
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        v_alive[v] = 0
        for i in range(indptr[v], indptr[v + 1]):
            e = inc[i]
            if not e_alive[e]:
                continue
            e_alive[e] = 0
            owner[e] = v
            for j in range(k):
                u = edges[e, j]
                deg[u] -= 1
                if deg[u] <= ell and not queued[u]:
                    queued[u] = 1
                    queue[tail] = u
                    tail += 1
    return v_alive_a, e_alive_a, owner_a


def match(i64[:, ::1] links, i64[::1] indptr, i64[::1] inc, i64 n, i64 ell):
    cdef i64 m = links.shape[0], k = links.shape[1]
    cdef i64 e, f, v, i, j, d, nxt_d, end, head, tail, limit, root, top, target
    cdef i64 phases = 0
    cdef bint pushed, found
    assign_a = np.full(m, -1, dtype=np.int64)
    load_a = np.zeros(n, dtype=np.int64)
    dist_a = np.empty(m, dtype=np.int64)
    vlayer_a = np.empty(n, dtype=np.int64)
    queue_a = np.empty(m, dtype=np.int64)
    e_ptr_a = np.empty(m, dtype=np.int64)
    v_ptr_a = np.empty(n, dtype=np.int64)
    stack_a = np.empty(m + 1, dtype=np.int64)
    via_a = np.empty(m + 1, dtype=np.int64)
    cdef i64[::1] assign = assign_a
    cdef i64[::1] load = load_a
    cdef i64[::1] dist = dist_a
    cdef i64[::1] vlayer = vlayer_a
    cdef i64[::1] queue = queue_a
    cdef i64[::1] e_ptr = e_ptr_a
    cdef i64[::1] v_ptr = v_ptr_a
    cdef i64[::1] stack = stack_a
    cdef i64[::1] via = via_a

    for e in range(m):
        for j in range(k):
            v = links[e, j]
            if v >= 0 and load[v] < ell:
                assign[e] = v
                load[v] += 1
                break

    while True:
        phases += 1
        head = 0
        tail = 0
        for e in range(m):
            if assign[e] < 0:
                dist[e] = 0
                queue[tail] = e
                tail += 1
            else:
                dist[e] = INF
        for v in range(n):
            vlayer[v] = INF
        if tail == 0:
            return assign_a, None, phases
        limit = INF
        while head < tail:
            e = queue[head]
            head += 1
            d = dist[e]
            if d > limit:
                break
            for j in range(k):
                v = links[e, j]
                if v < 0 or v == assign[e] or vlayer[v] != INF:
                    continue
                if load[v] < ell:
                    limit = d
                    continue
                vlayer[v] = d + 1
                for i in range(indptr[v], indptr[v + 1]):
                    f = inc[i]
                    if assign[f] == v and dist[f] == INF:
                        dist[f] = d + 1
                        queue[tail] = f
                        tail += 1
        if limit == INF:
            reach_a = (dist_a < INF).astype(np.uint8)
            return assign_a, reach_a, phases

        for e in range(m):
            e_ptr[e] = 0
        for v in range(n):
            v_ptr[v] = indptr[v]
        for root in range(m):
            if assign[root] >= 0 or dist[root] != 0:
                continue
            stack[0] = root
            top = 1
            while top > 0:
                e = stack[top - 1]
                pushed = False
                while e_ptr[e] < k:
                    v = links[e, e_ptr[e]]
                    if v < 0 or v == assign[e]:
                        e_ptr[e] += 1
                        continue
                    if load[v] < ell:
                        load[v] += 1
                        target = v
                        for j in range(top - 1, -1, -1):
                            f = stack[j]
                            assign[f] = target
                            dist[f] = INF
                            if j:
                                target = via[j - 1]
                        top = 0
                        pushed = True
                        break
                    nxt_d = dist[e] + 1
                    if vlayer[v] != nxt_d:
                        e_ptr[e] += 1
                        continue
                    end = indptr[v + 1]
                    found = False
                    while v_ptr[v] < end:
                        f = inc[v_ptr[v]]
                        if assign[f] == v and dist[f] == nxt_d:
                            found = True
                            break
                        v_ptr[v] += 1
                    if found:
                        stack[top] = f
                        via[top - 1] = v
                        top += 1
                        pushed = True
                        break
                    e_ptr[e] += 1
                if not pushed:
                    dist[e] = INF
                    top -= 1
