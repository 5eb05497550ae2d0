"""Multicast trees on an undirected weighted graph rooted at vertex 0.

``kmb_tree`` is the metric-closure 2-approximation; ``SteinerDP`` is an exact
Dreyfus-Wagner dynamic program over a terminal set.
"""
from __future__ import annotations

import numpy as np

from ..errors import InfeasibleError, ParameterError, SizeError
from .tsp import prim

EXACT_STEINER_LIMIT = 14


class WeightedGraph:
    """Undirected graph with positive edge weights; vertex 0 is the root."""

    def __init__(self, n_vertices, edges):
        n = int(n_vertices)
        if n < 1:
            raise ParameterError("graph needs at least the root vertex")
        W = np.full((n, n), np.inf)
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if not w > 0 or not np.isfinite(w):
                raise ParameterError(f"edge ({u}, {v}) has non-positive weight {w}")
            if u == v:
                continue
            if w < W[u, v]:
                W[u, v] = W[v, u] = w
        self.n = n
        self.weights = W
        self._dist = None
        self._next = None

    @classmethod
    def complete(cls, W):
        W = np.asarray(W, dtype=float)
        n = W.shape[0]
        return cls(n, [(u, v, W[u, v]) for u in range(n) for v in range(u + 1, n)])

    def edges(self):
        iu, iv = np.nonzero(np.triu(np.isfinite(self.weights), 1))
        return [(int(u), int(v), float(self.weights[u, v])) for u, v in zip(iu, iv)]

    def _shortest_paths(self):
        n = self.n
        dist = self.weights.copy()
        np.fill_diagonal(dist, 0.0)
        nxt = np.where(np.isfinite(dist), np.arange(n)[None, :], -1)
        for k in range(n):
            via = dist[:, k:k + 1] + dist[k:k + 1, :]
            better = via < dist
            if better.any():
                dist = np.where(better, via, dist)
                nxt = np.where(better, nxt[:, k:k + 1], nxt)
        self._dist, self._next = dist, nxt

    @property
    def dist(self):
        if self._dist is None:
            self._shortest_paths()
        return self._dist

    def path(self, u, v):
        if self._next is None:
            self._shortest_paths()
        if self._next[u, v] < 0:
            raise InfeasibleError(f"no path between vertices {u} and {v}")
        out = [u]
        while u != v:
            u = int(self._next[u, v])
            out.append(u)
        return out

    def connected(self, vertices):
        d = self.dist
        vs = list(vertices)
        return bool(np.all(np.isfinite(d[np.ix_(vs, vs)])))

    def tree_cost(self, edges):
        return float(sum(self.weights[u, v] for u, v in edges))


def _norm(u, v):
    return (u, v) if u < v else (v, u)


def prune_tree(edges, terminals):
    """Repeatedly drop leaves that are not terminals."""
    edges = set(_norm(u, v) for u, v in edges)
    terminals = set(terminals)
    while True:
        deg = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        leaves = {x for x, d in deg.items() if d == 1 and x not in terminals}
        if not leaves:
            return edges
        edges = {e for e in edges if e[0] not in leaves and e[1] not in leaves}


def kmb_tree(graph, terminals):
    """KMB heuristic.  ``terminals`` must include the root.  Returns
    ``(cost, edges)``; cost is at most twice the optimum."""
    T = sorted(set(int(t) for t in terminals))
    if len(T) <= 1:
        return 0.0, []
    if not graph.connected(T):
        raise InfeasibleError(f"terminals {T} are not connected")
    closure = graph.dist[np.ix_(T, T)]
    parent = prim(closure)
    expanded = set()
    for i in range(1, len(T)):
        p = graph.path(T[parent[i]], T[i])
        expanded.update(_norm(a, b) for a, b in zip(p, p[1:]))
    V = sorted({x for e in expanded for x in e} | set(T))
    # root 0 is always in T, hence V[0] == 0 for prim's start node
    sub = graph.weights[np.ix_(V, V)].copy()
    keep = np.zeros_like(sub, dtype=bool)
    pos = {v: i for i, v in enumerate(V)}
    for a, b in expanded:
        keep[pos[a], pos[b]] = keep[pos[b], pos[a]] = True
    sub[~keep] = np.inf
    par = prim(sub)
    tree = [(V[par[i]], V[i]) for i in range(1, len(V))]
    tree = sorted(prune_tree(tree, T))
    return graph.tree_cost(tree), tree


def _submasks(D):
    ar = np.arange(D + 1, dtype=np.int64)
    return ar[(ar & D) == ar]


class SteinerDP:
    """Dreyfus-Wagner table for trees joining ``anchor`` to any subset of
    ``terminals``.  ``cost(mask)`` answers in O(1) once built."""

    def __init__(self, graph, terminals, anchor=0):
        self.graph = graph
        self.terminals = [int(t) for t in terminals]
        self.anchor = int(anchor)
        t = len(self.terminals)
        if graph.n > EXACT_STEINER_LIMIT:
            raise SizeError(f"exact Steiner is limited to {EXACT_STEINER_LIMIT} vertices, "
                            f"graph has {graph.n}")
        dist = graph.dist
        n = graph.n
        self.dp = np.full((1 << t, n), np.inf)
        self.g = np.full((1 << t, n), np.inf)
        self.dp[0] = 0.0
        for i, k in enumerate(self.terminals):
            self.dp[1 << i] = dist[k]
        order = sorted(range(1, 1 << t), key=lambda m: bin(m).count("1"))
        for D in order:
            if D & (D - 1) == 0:
                continue
            low = D & -D
            subs = _submasks(D)
            subs = subs[(subs & low).astype(bool) & (subs != D)]
            split = self.dp[subs] + self.dp[D ^ subs]
            self.g[D] = split.min(axis=0)
            self.dp[D] = (self.g[D][:, None] + dist).min(axis=0)

    def mask_of(self, vertices):
        pos = {k: i for i, k in enumerate(self.terminals)}
        m = 0
        for v in vertices:
            v = int(v)
            if v == self.anchor:
                continue
            if v not in pos:
                raise ParameterError(f"vertex {v} is not a terminal of this table")
            m |= 1 << pos[v]
        return m

    def cost(self, mask):
        return float(self.dp[mask, self.anchor])

    def tree(self, mask):
        if mask == 0:
            return []
        if not np.isfinite(self.dp[mask, self.anchor]):
            raise InfeasibleError("terminals are not connected to the root")
        edges = set()
        self._rebuild(mask, self.anchor, edges)
        return sorted(edges)

    def _add_path(self, u, v, edges):
        p = self.graph.path(u, v)
        edges.update(_norm(a, b) for a, b in zip(p, p[1:]))

    def _rebuild(self, D, v, edges):
        if D & (D - 1) == 0:
            k = self.terminals[D.bit_length() - 1]
            self._add_path(k, v, edges)
            return
        dist = self.graph.dist
        u = int((self.g[D] + dist[:, v]).argmin())
        self._add_path(u, v, edges)
        low = D & -D
        subs = _submasks(D)
        subs = subs[(subs & low).astype(bool) & (subs != D)]
        E = int(subs[(self.dp[subs, u] + self.dp[D ^ subs, u]).argmin()])
        self._rebuild(E, u, edges)
        self._rebuild(D ^ E, u, edges)


def exact_steiner_tree(graph, terminals):
    """Optimal tree spanning ``terminals`` (which include the root)."""
    T = sorted(set(int(t) for t in terminals) - {0})
    if not T:
        return 0.0, []
    if not graph.connected([0] + T):
        raise InfeasibleError(f"terminals {T} are not connected to the root")
    table = SteinerDP(graph, T, anchor=0)
    full = (1 << len(T)) - 1
    return table.cost(full), table.tree(full)
