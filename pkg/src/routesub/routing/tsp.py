"""Closed tours from a depot: exact Held-Karp, MST doubling and 2-opt.

Internally node 0 is the depot and node ``i + 1`` is the i-th requested point.
Tours are returned as node sequences starting and ending at 0.
"""
from __future__ import annotations

import numpy as np

from ..errors import ParameterError, SizeError

EXACT_TSP_LIMIT = 15


class PointSet:
    """Item coordinates, a depot and an energy-per-distance rate."""

    def __init__(self, coords, depot=(0.0, 0.0), travel_rate=1.0):
        coords = np.asarray(coords, dtype=float).reshape(-1, 2)
        depot = np.asarray(depot, dtype=float).reshape(2)
        if not (np.all(np.isfinite(coords)) and np.all(np.isfinite(depot))):
            raise ParameterError("coordinates must be finite")
        if not travel_rate > 0:
            raise ParameterError(f"travel rate must be positive, got {travel_rate}")
        self.coords = coords
        self.depot = depot
        self.travel_rate = float(travel_rate)
        allp = np.vstack([depot[None, :], coords])
        diff = allp[:, None, :] - allp[None, :, :]
        # node 0 = depot, node i+1 = item i
        self.dist = np.sqrt((diff ** 2).sum(-1))

    @property
    def n(self):
        return self.coords.shape[0]

    def submatrix(self, items):
        nodes = np.concatenate([[0], np.asarray(items, dtype=np.int64) + 1])
        return self.dist[np.ix_(nodes, nodes)]


def tour_length(D, tour):
    tour = np.asarray(tour)
    return float(D[tour[:-1], tour[1:]].sum())


def _layers(m):
    masks = np.arange(1 << m, dtype=np.int64)
    pc = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        pc += (masks >> j) & 1
    return masks, pc


def held_karp_table(D):
    """Path table for every subset of nodes 1..m of distance matrix ``D``.

    Returns ``(dp, parent)`` where ``dp[mask, j]`` is the shortest path from
    node 0 through exactly the nodes in ``mask`` (bit j <-> node j+1) ending
    at node j+1.  Ties go to the lowest predecessor index.
    """
    m = D.shape[0] - 1
    if m > 20:
        raise SizeError(f"Held-Karp table over {m} nodes is too large")
    full = 1 << m
    dp = np.full((full, max(m, 1)), np.inf)
    parent = np.full((full, max(m, 1)), -1, dtype=np.int8)
    if m == 0:
        return dp, parent
    inner = D[1:, 1:]
    for j in range(m):
        dp[1 << j, j] = D[0, j + 1]
    masks, pc = _layers(m)
    for p in range(2, m + 1):
        layer = masks[pc == p]
        for j in range(m):
            sel = layer[(layer >> j) & 1 == 1]
            cand = dp[sel ^ (1 << j)] + inner[:, j][None, :]
            k = cand.argmin(axis=1)
            dp[sel, j] = cand[np.arange(sel.size), k]
            parent[sel, j] = k
    return dp, parent
    inner = D[1:, 1:]
    for j in range(m):
        dp[1 << j, j] = D[0, j + 1]
    masks, pc = _layers(m)
    bits = 1 << np.arange(m)
    for p in range(2, m + 1):
        layer = masks[pc == p]
        # cand[l, j, k]: reach node j of layer[l] from node k of layer[l] minus j
        cand = dp[layer[:, None] ^ bits] + inner.T[None, :, :]
        k = cand.argmin(axis=2)
        best = np.take_along_axis(cand, k[..., None], axis=2)[..., 0]
        inside = (layer[:, None] & bits) != 0
        dp[layer] = np.where(inside, best, np.inf)
        parent[layer] = np.where(inside, k, -1)
    return dp, parent


def _closing(dp, D, mask):
    m = D.shape[0] - 1
    vals = dp[mask, :m] + D[1:, 0]
    j = int(vals.argmin())
    return float(vals[j]), j


def _unwind(parent, mask, j):
    order = []
    while mask:
        order.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.reverse()
    return [0] + order + [0]


def exact_tour(D):
    """Optimal closed tour over every node of ``D`` (node 0 is the depot)."""
    m = D.shape[0] - 1
    if m > EXACT_TSP_LIMIT:
        raise SizeError(f"exact TSP is limited to {EXACT_TSP_LIMIT} points; "
                        f"got {m} (use a heuristic oracle kind)")
    if m == 0:
        return 0.0, [0, 0]
    dp, parent = held_karp_table(D)
    full = (1 << m) - 1
    length, j = _closing(dp, D, full)
    return length, _unwind(parent, full, j)


class SubsetTours:
    """Held-Karp table shared by every subset of a small ground set."""

    def __init__(self, D):
        self.D = D
        self.m = D.shape[0] - 1
        self.dp, self.parent = held_karp_table(D)
        # closed-tour length for every mask
        if self.m:
            self.lengths = (self.dp[:, :self.m] + D[1:, 0][None, :]).min(axis=1)
        else:
            self.lengths = np.zeros(1)
        self.lengths[0] = 0.0

    def length(self, mask):
        return float(self.lengths[mask])

    def tour(self, mask):
        if mask == 0:
            return [0, 0]
        _, j = _closing(self.dp, self.D, mask)
        return _unwind(self.parent, mask, j)


def prim(W):
    """MST over a dense weight matrix (inf = no edge) rooted at node 0.

    Returns the parent array (parent[0] = -1).  The lowest index wins ties.
    """
    m = W.shape[0]
    in_tree = np.zeros(m, dtype=bool)
    key = np.full(m, np.inf)
    parent = np.full(m, -1, dtype=np.int64)
    key[0] = 0.0
    for _ in range(m):
        cand = np.where(in_tree, np.inf, key)
        u = int(cand.argmin())
        if not np.isfinite(cand[u]):
            break
        in_tree[u] = True
        better = (~in_tree) & (W[u] < key)
        key[better] = W[u][better]
        parent[better] = u
    return parent


def mst_double_tour(D):
    """Preorder walk of the MST rooted at the depot, shortcut into a tour."""
    m = D.shape[0]
    if m == 1:
        return 0.0, [0, 0]
    parent = prim(D)
    children = [[] for _ in range(m)]
    for v in range(1, m):
        children[parent[v]].append(v)
    order, stack = [], [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(reversed(children[u]))
    tour = order + [0]
    return tour_length(D, tour), tour


def two_opt(D, tour, eps=1e-12):
    """First-improvement 2-opt on a closed tour; never lengthens it."""
    tour = list(tour)
    m = len(tour) - 1
    if m < 4:
        return tour_length(D, tour), tour
    improved = True
    while improved:
        improved = False
        t = np.asarray(tour)
        for i in range(1, m - 1):
            a, b = t[i - 1], t[i]
            js = np.arange(i + 1, m)
            c, d = t[js], t[js + 1]
            delta = D[a, c] + D[b, d] - D[a, b] - D[c, d]
            hit = np.flatnonzero(delta < -eps)
            if hit.size:
                j = int(js[hit[0]])
                tour[i:j + 1] = tour[i:j + 1][::-1]
                improved = True
                break
    return tour_length(D, tour), tour
