# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the loops in ``_fallback.py``.

Floating-point operations are issued in the same order as the Python
versions so both backends return identical bits.
"""
import numpy as np

from libc.math cimport INFINITY, pow, sqrt
from libc.stdlib cimport free, malloc


def exposure_matrix(node_xy, node_noise, warden_xy, warden_noise, double alpha):
    cdef const double[:, ::1] nxy = np.ascontiguousarray(node_xy, dtype=np.float64).reshape(-1, 2)
    cdef const double[::1] rn = np.ascontiguousarray(node_noise, dtype=np.float64)
    cdef const double[:, ::1] wxy = np.ascontiguousarray(warden_xy, dtype=np.float64).reshape(-1, 2)
    cdef const double[::1] wn = np.ascontiguousarray(warden_noise, dtype=np.float64)
    cdef Py_ssize_t n = nxy.shape[0], m = wxy.shape[0], i, j, k
    cdef double load, dx, dy, dist
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        load = 0.0
        for k in range(m):
            dx = nxy[i, 0] - wxy[k, 0]
            dy = nxy[i, 1] - wxy[k, 1]
            dist = sqrt(dx * dx + dy * dy)
            if dist == 0.0:
                load = INFINITY
                break
            load += 1.0 / (wn[k] * pow(dist, alpha))
        for j in range(n):
            if i == j:
                out[i, j] = INFINITY
                continue
            if load == 0.0:
                out[i, j] = 0.0
                continue
            dx = nxy[i, 0] - nxy[j, 0]
            dy = nxy[i, 1] - nxy[j, 1]
            dist = sqrt(dx * dx + dy * dy)
            out[i, j] = rn[j] * pow(dist, alpha) * load
    return out_arr


cdef bint _prefix_less(long *pred, long a, long b, long *buf_a, long *buf_b):
    cdef long la = 0, lb = 0, t
    while a != -1:
        buf_a[la] = a
        la += 1
        a = pred[a]
    while b != -1:
        buf_b[lb] = b
        lb += 1
        b = pred[b]
    # buffers hold the sequences reversed; compare from the source end
    while la > 0 and lb > 0:
        la -= 1
        lb -= 1
        if buf_a[la] != buf_b[lb]:
            return buf_a[la] < buf_b[lb]
    return la < lb


def dense_dijkstra(cost, long src, long dst):
    cdef const double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef long n = c.shape[0], u, v, it, hu, best_h
    cdef double best, du, w, cand
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef long *hops = <long *> malloc(n * sizeof(long))
    cdef long *pred = <long *> malloc(n * sizeof(long))
    cdef char *done = <char *> malloc(n * sizeof(char))
    cdef long *buf_a = <long *> malloc((n + 1) * sizeof(long))
    cdef long *buf_b = <long *> malloc((n + 1) * sizeof(long))
    if not (dist and hops and pred and done and buf_a and buf_b):
        free(dist); free(hops); free(pred); free(done); free(buf_a); free(buf_b)
        raise MemoryError()
    try:
        for v in range(n):
            dist[v] = INFINITY
            hops[v] = 0
            pred[v] = -1
            done[v] = 0
        dist[src] = 0.0
        for it in range(n):
            u = -1
            best = INFINITY
            best_h = 0
            for v in range(n):
                if done[v] or dist[v] == INFINITY:
                    continue
                if u == -1 or dist[v] < best or (dist[v] == best and hops[v] < best_h):
                    u = v
                    best = dist[v]
                    best_h = hops[v]
            if u == -1:
                break
            done[u] = 1
            if u == dst:
                break
            du = dist[u]
            hu = hops[u] + 1
            for v in range(n):
                w = c[u, v]
                if done[v] or w == INFINITY or v == u:
                    continue
                cand = du + w
                if cand < dist[v] or (
                    cand == dist[v]
                    and (hu < hops[v] or (hu == hops[v] and _prefix_less(pred, u, pred[v], buf_a, buf_b)))
                ):
                    dist[v] = cand
                    hops[v] = hu
                    pred[v] = u
        if dist[dst] == INFINITY:
            return None
        path = []
        v = dst
        while v != -1:
            path.append(v)
            v = pred[v]
        path.reverse()
        return path, dist[dst]
    finally:
        free(dist); free(hops); free(pred); free(done); free(buf_a); free(buf_b)
