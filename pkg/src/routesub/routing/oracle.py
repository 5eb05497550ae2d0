"""Routing-cost oracles: per-item visiting costs plus a tour or tree cost.

All oracles share one contract: ``route_cost(S)`` returns ``(cost, witness)``
where cost = sum of visiting costs + route cost, ``route_cost([]) == 0``.
Oracles memoize by set; ``calls`` counts logical evaluations and
``cache_hits`` counts how many of them were served from the cache.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InfeasibleError, ParameterError, PreconditionError, SizeError
from .steiner import EXACT_STEINER_LIMIT, SteinerDP, exact_steiner_tree, kmb_tree, prune_tree
from .tsp import EXACT_TSP_LIMIT, PointSet, SubsetTours, exact_tour, mst_double_tour, tour_length, two_opt

DEPOT = -1
# marginal-cost floor when every visiting cost is zero
MIN_MARGINAL = 1e-9
TABLE_LIMIT = 12


@dataclass(frozen=True)
class RouteWitness:
    """A concrete route for an item set.

    ``tour`` holds item ids bracketed by ``DEPOT``; ``edges`` holds graph vertex
    pairs (item i is vertex i + 1, the root is vertex 0).  ``travel`` is the
    route part of the cost, ``visiting`` the sum of per-item costs.
    """

    kind: str
    items: tuple
    travel: float
    visiting: float
    tour: tuple = ()
    edges: tuple = ()

    @property
    def total(self):
        return self.travel + self.visiting


EMPTY = RouteWitness("empty", (), 0.0, 0.0)


class CostOracle:
    kind = "abstract"
    guarantee_factor = 1.0

    def __init__(self, n, visiting_costs=None, monotone_clamp=True):
        self.n = int(n)
        vc = np.zeros(self.n) if visiting_costs is None else np.asarray(visiting_costs, dtype=float)
        if vc.shape != (self.n,):
            raise ParameterError(f"expected {self.n} visiting costs, got shape {vc.shape}")
        if np.any(vc < 0) or not np.all(np.isfinite(vc)):
            raise ParameterError("visiting costs must be finite and nonnegative")
        self.visiting_costs = vc
        self.c_min = float(vc.min()) if self.n else 0.0
        self.monotone_clamp = bool(monotone_clamp)
        self.calls = 0
        self.cache_hits = 0
        self._cache = {}
        self._lock = threading.Lock()

    @property
    def theta(self):
        return self.guarantee_factor - 1.0

    @property
    def exact(self):
        return self.guarantee_factor == 1.0

    def _key(self, S):
        key = frozenset(int(s) for s in S)
        for s in key:
            if not 0 <= s < self.n:
                raise DomainError(f"item {s} is outside the ground set 0..{self.n - 1}")
        return key

    def route_cost(self, S):
        key = self._key(S)
        with self._lock:
            self.calls += 1
            w = self._cache.get(key)
            if w is not None:
                self.cache_hits += 1
        if w is None:
            items = tuple(sorted(key))
            w = self._route(items) if items else EMPTY
            self._cache[key] = w
        return w.total, w

    def cost(self, S):
        return self.route_cost(S)[0]

    def _visiting(self, items):
        return float(self.visiting_costs[list(items)].sum()) if items else 0.0

    def _route(self, items):
        raise NotImplementedError

    def restrict(self, witness, S):
        """A route for ``S`` derived from a witness covering a superset of it."""
        raise NotImplementedError

    def marginal_cost(self, S, x):
        S = set(S)
        if x in S:
            raise PreconditionError(f"item {x} is already in the set")
        diff = self.cost(S | {x}) - self.cost(S)
        return max(diff, self.marginal_floor)

    @property
    def marginal_floor(self):
        return self.c_min if self.c_min > 0 else MIN_MARGINAL

    def chain(self):
        return CostChain(self)

    def recost(self, witness):
        """Recompute a witness's cost from the underlying geometry."""
        raise NotImplementedError


class CostChain:
    """Cost along a nested sequence of sets (one greedy run).

    With ``monotone_clamp`` the reported cost never drops below the previous
    link's cost (plus ``c_min`` when visiting costs are positive), so a
    heuristic oracle still looks nondecreasing along the chain.
    """

    def __init__(self, oracle):
        self.oracle = oracle
        self.items = []
        self.cost = 0.0
        self.witness = EMPTY
        self.raw = [0.0]

    def probe(self, x):
        raw, w = self.oracle.route_cost(self.items + [x])
        cost = raw
        if self.oracle.monotone_clamp:
            floor = self.cost + (self.oracle.c_min if self.oracle.c_min > 0 else 0.0)
            cost = max(raw, floor)
        return cost, raw, w

    def push(self, x, cost, raw, witness):
        self.items.append(x)
        self.cost = cost
        self.witness = witness
        self.raw.append(raw)


class TourOracle(CostOracle):
    """Closed tours from the depot over a PointSet; cost in energy units."""

    FACTORS = {"tsp-exact": 1.0, "tsp-mst-double": 2.0, "tsp-two-opt": 2.0}

    def __init__(self, points, visiting_costs=None, kind="tsp-exact", exact_below=None,
                 monotone_clamp=True):
        if kind not in self.FACTORS:
            raise ParameterError(f"unknown tour oracle kind {kind!r}")
        super().__init__(points.n, visiting_costs, monotone_clamp)
        self.points = points
        self.kind = kind
        self.guarantee_factor = self.FACTORS[kind]
        self.exact_below = exact_below
        self._table = None

    def _subset_table(self):
        if self._table is None:
            self._table = SubsetTours(self.points.dist)
        return self._table

    def _tour(self, items):
        D = self.points.submatrix(items)
        m = len(items)
        use_exact = self.kind == "tsp-exact" or (
            self.exact_below is not None and m <= self.exact_below)
        if use_exact:
            if self.n <= TABLE_LIMIT:
                t = self._subset_table()
                mask = sum(1 << i for i in items)
                length, nodes = t.length(mask), t.tour(mask)
                return length, [j - 1 if j else DEPOT for j in nodes]
            length, local = exact_tour(D)
        else:
            length, local = mst_double_tour(D)
            if self.kind == "tsp-two-opt":
                length, local = two_opt(D, local)
        return length, [items[j - 1] if j else DEPOT for j in local]

    def _route(self, items):
        length, tour = self._tour(items)
        return RouteWitness("tour", items, self.points.travel_rate * length,
                            self._visiting(items), tour=tuple(tour))

    def tour_travel(self, tour):
        nodes = [0 if v == DEPOT else v + 1 for v in tour]
        return self.points.travel_rate * tour_length(self.points.dist, nodes)

    def recost(self, witness):
        if not witness.items:
            return 0.0
        return self.tour_travel(witness.tour) + self._visiting(witness.items)

    def restrict(self, witness, S):
        keep = set(S)
        if not keep <= set(witness.items):
            raise PreconditionError("witness does not cover the requested set")
        items = tuple(sorted(keep))
        if not items:
            return EMPTY
        tour = tuple(v for v in witness.tour if v == DEPOT or v in keep)
        return RouteWitness("tour", items, self.tour_travel(tour), self._visiting(items),
                            tour=tour)


def exact_tsp(points, S):
    """Optimal depot tour over ``S``: ``(energy, witness)`` without visiting costs."""
    items = tuple(sorted(set(int(s) for s in S)))
    if len(items) > EXACT_TSP_LIMIT:
        raise SizeError(f"exact TSP is limited to {EXACT_TSP_LIMIT} items; use a heuristic kind")
    if not items:
        return 0.0, EMPTY
    length, local = exact_tour(points.submatrix(items))
    tour = tuple(items[j - 1] if j else DEPOT for j in local)
    cost = points.travel_rate * length
    return cost, RouteWitness("tour", items, cost, 0.0, tour=tour)


def mst_double_tsp(points, S):
    items = tuple(sorted(set(int(s) for s in S)))
    if not items:
        return 0.0, EMPTY
    length, local = mst_double_tour(points.submatrix(items))
    tour = tuple(items[j - 1] if j else DEPOT for j in local)
    cost = points.travel_rate * length
    return cost, RouteWitness("tour", items, cost, 0.0, tour=tour)


def two_opt_improve(witness, points):
    """2-opt pass over a tour witness; the result is never longer."""
    if not witness.items:
        return witness
    items = witness.items
    pos = {v: i + 1 for i, v in enumerate(items)}
    local = [0 if v == DEPOT else pos[v] for v in witness.tour]
    length, local = two_opt(points.submatrix(items), local)
    tour = tuple(items[j - 1] if j else DEPOT for j in local)
    return RouteWitness("tour", items, points.travel_rate * length, witness.visiting, tour=tour)


class TreeOracle(CostOracle):
    """Multicast tree from the root (vertex 0) to the vertices of S."""

    FACTORS = {"steiner-exact": 1.0, "steiner-kmb": 2.0}

    def __init__(self, graph, visiting_costs=None, kind="steiner-kmb", monotone_clamp=True):
        if kind not in self.FACTORS:
            raise ParameterError(f"unknown tree oracle kind {kind!r}")
        super().__init__(graph.n - 1, visiting_costs, monotone_clamp)
        self.graph = graph
        self.kind = kind
        self.guarantee_factor = self.FACTORS[kind]
        self._table = None

    def _exact(self, vertices):
        if self.graph.n > EXACT_STEINER_LIMIT:
            raise SizeError(f"exact Steiner is limited to {EXACT_STEINER_LIMIT} vertices")
        if self.graph.n <= TABLE_LIMIT:
            if self._table is None:
                self._table = SteinerDP(self.graph, range(1, self.graph.n))
            mask = self._table.mask_of(vertices)
            return self._table.cost(mask), self._table.tree(mask)
        return exact_steiner_tree(self.graph, [0] + list(vertices))

    def _route(self, items):
        vertices = [i + 1 for i in items]
        if self.kind == "steiner-exact":
            if not self.graph.connected([0] + vertices):
                raise InfeasibleError(f"items {list(items)} are not connected to the root")
            cost, edges = self._exact(vertices)
        else:
            cost, edges = kmb_tree(self.graph, [0] + vertices)
        return RouteWitness("tree", items, cost, self._visiting(items), edges=tuple(edges))

    def recost(self, witness):
        return self.graph.tree_cost(witness.edges) + self._visiting(witness.items)

    def restrict(self, witness, S):
        keep = set(S)
        if not keep <= set(witness.items):
            raise PreconditionError("witness does not cover the requested set")
        items = tuple(sorted(keep))
        if not items:
            return EMPTY
        edges = tuple(sorted(prune_tree(witness.edges, {0} | {i + 1 for i in items})))
        return RouteWitness("tree", items, self.graph.tree_cost(edges), self._visiting(items),
                            edges=edges)


def kmb_steiner(graph, S):
    """KMB tree joining the root to vertices ``S``: ``(cost, witness)``."""
    vertices = sorted(set(int(s) for s in S) - {0})
    if not vertices:
        return 0.0, EMPTY
    cost, edges = kmb_tree(graph, [0] + vertices)
    return cost, RouteWitness("tree", tuple(v - 1 for v in vertices), cost, 0.0,
                              edges=tuple(edges))


def exact_steiner(graph, S):
    vertices = sorted(set(int(s) for s in S) - {0})
    if not vertices:
        return 0.0, EMPTY
    if graph.n > EXACT_STEINER_LIMIT:
        raise SizeError(f"exact Steiner is limited to {EXACT_STEINER_LIMIT} vertices")
    cost, edges = exact_steiner_tree(graph, [0] + vertices)
    return cost, RouteWitness("tree", tuple(v - 1 for v in vertices), cost, 0.0,
                              edges=tuple(edges))


class TabulatedCost(CostOracle):
    """Explicit route cost per subset (bitmask-indexed), visiting costs added.

    Exists for hand-traced tests; ``factor`` declares the guarantee.
    """

    kind = "tabulated"

    def __init__(self, route_values, n, visiting_costs=None, factor=1.0, monotone_clamp=True):
        super().__init__(n, visiting_costs, monotone_clamp)
        vals = np.asarray(route_values, dtype=float)
        if vals.size != 1 << n:
            raise ParameterError(f"expected {1 << n} route values, got {vals.size}")
        self.route_values = vals
        self.guarantee_factor = float(factor)

    @classmethod
    def from_function(cls, n, fn, **kw):
        vals = [fn(frozenset(i for i in range(n) if m >> i & 1)) for m in range(1 << n)]
        return cls(vals, n, **kw)

    def _route(self, items):
        mask = sum(1 << i for i in items)
        return RouteWitness("table", items, float(self.route_values[mask]), self._visiting(items))

    def recost(self, witness):
        mask = sum(1 << i for i in witness.items)
        return float(self.route_values[mask]) + self._visiting(witness.items)

    def restrict(self, witness, S):
        return self.route_cost(S)[1]


def witness_valid(oracle, witness, S, tol=1e-9):
    """Check a witness covers exactly S and re-costs to its reported total."""
    items = set(int(s) for s in S)
    if set(witness.items) != items:
        return False
    if not items:
        return witness.total == 0.0
    if witness.kind == "tour":
        t = witness.tour
        if t[0] != DEPOT or t[-1] != DEPOT or set(t) - {DEPOT} != items:
            return False
    elif witness.kind == "tree":
        verts = {x for e in witness.edges for x in e}
        if not ({0} | {i + 1 for i in items}) <= verts:
            return False
        # connected and acyclic
        if len(witness.edges) != len(verts) - 1:
            return False
        adj = {v: [] for v in verts}
        for u, v in witness.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, stack = {0}, [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if seen != verts:
            return False
    return math.isclose(oracle.recost(witness), witness.total, rel_tol=0, abs_tol=tol)
