"""Pure-Python kernels.

These are the reference versions of the loops in ``_kernels.pyx``.  Both
evaluate floating-point expressions in the same order so that the two
backends agree bit for bit.
"""
import math

import numpy as np

INF = math.inf


def exposure_matrix(node_xy, node_noise, warden_xy, warden_noise, alpha):
    """Directed link exposure ``omega[i, j]`` for transmitter ``i`` and receiver ``j``.

    ``omega[i, j] = noise[j] * d(i, j)**alpha * sum_k 1 / (wnoise[k] * d(i, k)**alpha)``.
    The diagonal is ``inf`` (no self links); a warden sitting on a
    transmitter makes every link out of that transmitter ``inf``.
    """
    n = len(node_xy)
    m = len(warden_xy)
    alpha = float(alpha)
    nx = [float(v) for v in node_xy[:, 0]] if n else []
    ny = [float(v) for v in node_xy[:, 1]] if n else []
    wx = [float(v) for v in warden_xy[:, 0]] if m else []
    wy = [float(v) for v in warden_xy[:, 1]] if m else []
    wn = [float(v) for v in warden_noise]
    rn = [float(v) for v in node_noise]

    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        load = 0.0
        for k in range(m):
            dx = nx[i] - wx[k]
            dy = ny[i] - wy[k]
            dist = math.sqrt(dx * dx + dy * dy)
            if dist == 0.0:
                load = INF
                break
            load += 1.0 / (wn[k] * dist**alpha)
        row = out[i]
        for j in range(n):
            if i == j:
                row[j] = INF
                continue
            if load == 0.0:
                row[j] = 0.0
                continue
            dx = nx[i] - nx[j]
            dy = ny[i] - ny[j]
            dist = math.sqrt(dx * dx + dy * dy)
            row[j] = rn[j] * dist**alpha * load
    return out


def _prefix_less(pred, a, b):
    """True if the source-rooted node sequence ending at ``a`` sorts before the one at ``b``.

    Both chains must have the same hop count.
    """
    seq_a = []
    seq_b = []
    while a != -1:
        seq_a.append(a)
        a = pred[a]
    while b != -1:
        seq_b.append(b)
        b = pred[b]
    seq_a.reverse()
    seq_b.reverse()
    return seq_a < seq_b


def dense_dijkstra(cost, src, dst):
    """Single-pair Dijkstra on a dense cost matrix.

    Labels are ordered by (cost, hop count, node-index sequence); ``inf``
    entries are missing links.  Returns ``(path, total)`` with ``path`` a
    list of row indices, or ``None`` when ``dst`` is unreachable.
    """
    n = cost.shape[0]
    rows = cost.tolist()
    dist = [INF] * n
    hops = [0] * n
    pred = [-1] * n
    done = [False] * n
    dist[src] = 0.0
    for _ in range(n):
        u = -1
        best = INF
        best_h = 0
        for v in range(n):
            if done[v] or dist[v] == INF:
                continue
            if u == -1 or dist[v] < best or (dist[v] == best and hops[v] < best_h):
                u, best, best_h = v, dist[v], hops[v]
        if u == -1:
            break
        done[u] = True
        if u == dst:
            break
        row = rows[u]
        du = dist[u]
        hu = hops[u] + 1
        for v in range(n):
            w = row[v]
            if done[v] or w == INF or v == u:
                continue
            cand = du + w
            if cand < dist[v] or (
                cand == dist[v]
                and (hu < hops[v] or (hu == hops[v] and _prefix_less(pred, u, pred[v])))
            ):
                dist[v] = cand
                hops[v] = hu
                pred[v] = u
    if dist[dst] == INF:
        return None
    path = []
    v = dst
    while v != -1:
        path.append(v)
        v = pred[v]
    path.reverse()
    return path, dist[dst]
