"""Brute-force oracles and property checks backing the approximation claims.

Everything here enumerates subsets, so it only runs on desk-scale instances.
The ``check_*`` functions take a list of seeds, build one small instance per
seed and return a :class:`VerificationReport`.
"""
from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ._report import VerificationReport, Violation
from .errors import SizeError
from .objectives import (CovarianceMatrix, CutDiversity, MutualInformation, SimilarityMatrix,
                         SummarizationDiversity, Tabulated, check_submodularity, subset_table)
from .optimizer import Instance, default_k, deterministic_usm, solve, stage_one
from .routing import (CostOracle, PointSet, RouteWitness, SteinerDP, TabulatedCost, TourOracle,
                      TreeOracle, WeightedGraph, exact_steiner, exact_tsp, kmb_steiner,
                      mst_double_tsp, two_opt_improve)
from .routing.tsp import SubsetTours

__all__ = [
    "VerificationReport", "Violation", "PerturbedCost", "exact_cost_table", "brute_force_opt",
    "compute_k_parameter", "random_submodular_table", "small_tour_instance",
    "small_tree_instance", "check_bicriterion", "check_prefix_theorems", "check_usm",
    "check_routing_envelopes", "check_oracle", "run_suite", "submodularity_reports",
]

log = logging.getLogger(__name__)

TOL = 1e-9
BRUTE_TSP_LIMIT = 12
BRUTE_STEINER_LIMIT = 10


def _popcount(masks):
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for j in range(63):
        if not (masks >> j).any():
            break
        out += (masks >> j) & 1
    return out


def _visit_table(visiting):
    n = len(visiting)
    masks = np.arange(1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    return bits @ np.asarray(visiting, dtype=float)


def exact_cost_table(oracle):
    """Exact cost of every subset of the ground set, indexed by bitmask."""
    n = oracle.n
    if isinstance(oracle, TourOracle):
        if n > BRUTE_TSP_LIMIT:
            raise SizeError(f"brute force over tours is limited to n <= {BRUTE_TSP_LIMIT}")
        tours = SubsetTours(oracle.points.dist)
        return oracle.points.travel_rate * tours.lengths + _visit_table(oracle.visiting_costs)
    if isinstance(oracle, TreeOracle):
        if n > BRUTE_STEINER_LIMIT:
            raise SizeError(f"brute force over trees is limited to n <= {BRUTE_STEINER_LIMIT}")
        dp = SteinerDP(oracle.graph, range(1, n + 1))
        return dp.dp[:, 0].copy() + _visit_table(oracle.visiting_costs)
    if isinstance(oracle, TabulatedCost):
        return oracle.route_values + _visit_table(oracle.visiting_costs)
    if isinstance(oracle, PerturbedCost):
        return exact_cost_table(oracle.base)
    raise TypeError(f"no exact table for oracle kind {oracle.kind!r}")


def _lex_key(m, n):
    return tuple(i for i in range(n) if m >> i & 1)


def brute_force_opt(instance, cost_table=None, value_table=None, budget=None):
    """Best set with exact cost within the (original) budget.

    Ties go to the lexicographically smallest sorted item tuple.  ``budget``
    overrides the instance's budget (zero is allowed here).
    """
    n = instance.n
    budget = instance.budget if budget is None else budget
    costs = exact_cost_table(instance.cost) if cost_table is None else cost_table
    values = subset_table(instance.objective) if value_table is None else value_table
    feasible = np.flatnonzero(costs <= budget + TOL)
    best = values[feasible].max()
    ties = feasible[values[feasible] == best]
    m = min((int(t) for t in ties), key=lambda t: _lex_key(t, n))
    return frozenset(_lex_key(m, n)), float(best)


def compute_k_parameter(instance, cost_table=None, budget=None):
    """Ratio ceil(max base size / min base size) of the exact-cost system."""
    n = instance.n
    budget = instance.budget if budget is None else budget
    costs = exact_cost_table(instance.cost) if cost_table is None else cost_table
    feasible = costs <= budget + TOL
    masks = np.arange(1 << n, dtype=np.int64)
    if not any(feasible[1 << i] for i in range(n)):
        log.warning("no feasible singleton; k parameter defaults to 1")
        return 1
    maximal = feasible.copy()
    for i in range(n):
        without = (masks >> i) & 1 == 0
        ext = masks | (1 << i)
        maximal &= ~(without & feasible[ext])
    sizes = _popcount(masks[maximal])
    return int(math.ceil(sizes.max() / sizes.min()))


class PerturbedCost(CostOracle):
    """Exact oracle inflated by a deterministic per-set factor in [1, 1 + theta].

    A stand-in approximation oracle that satisfies rho <= rho~ <= (1+theta) rho
    pointwise without being monotone.
    """

    kind = "perturbed"

    def __init__(self, base, theta, seed=0):
        super().__init__(base.n, base.visiting_costs, monotone_clamp=True)
        self.base = base
        self.guarantee_factor = 1.0 + theta
        self.seed = seed

    def _u(self, items):
        h = hashlib.blake2b(f"{self.seed}:{items}".encode(), digest_size=8).digest()
        return int.from_bytes(h, "little") / 2.0 ** 64

    def _route(self, items):
        total = self.base.cost(items) * (1.0 + self.theta * self._u(items))
        vis = self._visiting(items)
        return RouteWitness("table", items, total - vis, vis)

    def recost(self, witness):
        return witness.total

    def restrict(self, witness, S):
        return self.route_cost(S)[1]


def random_submodular_table(n, rng):
    """Random nonnegative submodular function on n items, tabulated.

    A positive mix of a directed cut (nonmonotone), a weighted coverage and a
    concave-of-modular term; each part is nonnegative and submodular.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    M = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    W = rng.random((n, n)) * (rng.random((n, n)) < 0.6)
    np.fill_diagonal(W, 0.0)
    cut = ((M @ W) * (1.0 - M)).sum(axis=1)
    U = max(2, n)
    C = (rng.random((n, U)) < 0.3).astype(float)
    cover = ((M @ C) > 0).astype(float) @ rng.random(U)
    concave = np.sqrt(M @ rng.random(n))
    a, b, c = rng.random(3) * np.array([1.0, rng.integers(0, 2), rng.integers(0, 2)])
    vals = (0.5 + a) * cut + b * cover + c * concave
    return Tabulated(vals, n)


def _random_cov(points, rng, length=None):
    length = rng.uniform(1.5, 5.0) if length is None else length
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(-1)
    return np.exp(-d2 / (2 * length ** 2)) + 0.05 * np.eye(len(points))


def small_tour_instance(n, seed, theta=0.0, objective="mixed", kind="tsp-exact", k=None):
    """Random Euclidean instance on [0, 10]^2 with depot at the origin.

    The budget is drawn between the largest singleton cost and the full tour
    cost so every singleton is feasible.
    """
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2)) * 10.0
    visiting = rng.uniform(0.2, 2.0, n)
    points = PointSet(pts, (0.0, 0.0), 1.0)
    oracle = TourOracle(points, visiting, kind=kind)
    if objective == "mixed":
        objective = ("mi", "table")[(seed // 4) % 2]
    if objective == "mi":
        f = MutualInformation(CovarianceMatrix(_random_cov(pts, rng)))
    elif objective == "table":
        f = random_submodular_table(n, rng)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    single = max(_exact_tour_cost(oracle, i) for i in range(n))
    full = _exact_tour_cost(oracle, None)
    budget = max(single, rng.uniform(0.15, 0.8) * full)
    return Instance(f, oracle, budget, theta=max(theta, oracle.theta), k=k)


def _exact_tour_cost(oracle, item):
    items = range(oracle.n) if item is None else [item]
    travel, _ = exact_tsp(oracle.points, items)
    return travel + float(oracle.visiting_costs[list(items)].sum())


def small_tree_instance(n, seed, kind="steiner-kmb", k=None, max_weight=10):
    """Random connected graph on n items + root with integer weights."""
    rng = np.random.default_rng(seed)
    V = n + 1
    while True:
        edges = [(u, v, int(rng.integers(1, max_weight + 1)))
                 for u in range(V) for v in range(u + 1, V) if rng.random() < 0.5]
        g = WeightedGraph(V, edges)
        if g.connected(range(V)):
            break
    oracle = TreeOracle(g, kind=kind)
    exact = TreeOracle(g, kind="steiner-exact")
    costs = exact_cost_table(exact)
    single = max(costs[1 << i] for i in range(n))
    budget = max(single, rng.uniform(0.2, 0.8) * costs[-1])
    pts = rng.random((n, 2)) * 10.0
    f = MutualInformation(CovarianceMatrix(_random_cov(pts, rng)))
    return Instance(f, oracle, budget, theta=oracle.theta, k=k), exact


def check_bicriterion(seeds, n=8, thetas=(0.0, 0.1, 0.5, 1.0)):
    """Value >= k/(4(k+1)^2) * OPT and cost <= (1+theta) * budget.

    OPT and k come from enumeration with the exact tour oracle; the solver uses
    the same exact oracle, run with loop count k and a relaxed budget for the
    seed's theta.  With theta = 0 the solution must also fit the budget itself.
    """
    rep = VerificationReport("bicriterion")
    for seed in seeds:
        theta = thetas[seed % len(thetas)]
        inst = small_tour_instance(n, seed, theta=theta)
        costs = exact_cost_table(inst.cost)
        values = subset_table(inst.objective)
        opt_set, opt = brute_force_opt(inst, costs, values)
        k = compute_k_parameter(inst, costs)
        inst.k = k
        sol = solve(inst)
        bound = k / (4.0 * (k + 1) ** 2) * opt
        rep.record(seed, sol.value >= bound - TOL, sol.value, bound,
                   witness=(tuple(sol.selected), tuple(sorted(opt_set)), k), note="value")
        rep.record(seed, sol.cost <= inst.relaxed_budget + TOL, sol.cost, inst.relaxed_budget,
                   witness=(tuple(sol.selected),), note="cost")
        if theta == 0.0:
            true_cost = costs[sum(1 << i for i in sol.selected)]
            rep.record(seed, true_cost <= inst.budget + TOL, true_cost, inst.budget,
                       witness=(tuple(sol.selected),), note="exact cost")
    return rep


def check_usm(seeds, n_max=12):
    """USM output >= max over all subsets / 3 on random tabulated functions."""
    rep = VerificationReport("usm-third")
    for seed in seeds:
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, n_max + 1))
        f = random_submodular_table(n, rng)
        order = [int(i) for i in rng.permutation(n)]
        _, value = deterministic_usm(order, f)
        best = float(f.values.max())
        rep.record(seed, value >= best / 3.0 - TOL, value, best / 3.0, witness=(n,))
    return rep


def _is_prefix(a, b):
    return len(a) <= len(b) and list(b[:len(a)]) == list(a)


def _prefix_pair(inst, exact, approx, S, limit):
    exact_run = stage_one(S, inst, limit=inst.budget, oracle=exact)
    approx_run = stage_one(S, inst, limit=limit, oracle=approx)
    return exact_run, approx_run


def check_prefix_theorems(seeds, n=8, regimes=("half", 1, 2, 3), tree_seeds=()):
    """Run the exact-cost and approximate-cost greedy loops side by side.

    For each iteration (same leftover set for both loops) assert: the exact
    loop's sequence is a prefix of the approximate one; it lies among the
    prefixes stage two revisits; and when theta <= r * c_min / budget the
    approximate loop admits at most r extra items.  Regimes: ``"half"`` is
    theta = c_min / (2 budget) (r = 1), an integer r is theta = r c_min / budget.
    The approximate oracle alternates between the exact oracle itself (budget
    inflation only) and a pointwise-perturbed copy.  ``tree_seeds`` add KMB vs
    exact Steiner runs at theta = 1 (containment only).
    """
    rep = VerificationReport("prefix-theorems")
    for seed in seeds:
        base = small_tour_instance(n, seed)
        exact = base.cost
        c_min = exact.c_min
        for regime in regimes:
            r = 1 if regime == "half" else int(regime)
            theta = c_min / (2 * base.budget) if regime == "half" else r * c_min / base.budget
            approx = exact if seed % 2 == 0 else PerturbedCost(exact, theta, seed)
            inst = Instance(base.objective, exact, base.budget, theta=theta, k=default_k(n))
            _side_by_side(rep, seed, inst, exact, approx, r, f"r={regime}")
    for seed in tree_seeds:
        inst, exact = small_tree_instance(n, seed)
        inst.k = default_k(n)
        _side_by_side(rep, seed, inst, exact, inst.cost, None, "kmb")
    return rep


def _side_by_side(rep, seed, inst, exact, approx, r, tag):
    S = list(range(inst.n))
    limit = inst.relaxed_budget
    for it in range(1, inst.k + 1):
        ex, ap = _prefix_pair(inst, exact, approx, S, limit)
        # the theorems presuppose rho <= rho~ <= (1+theta) rho on the evaluated sets
        promise = all(
            exact.cost(ap.X[:j]) - TOL <= ap.costs[j] <= (1 + inst.theta) * exact.cost(ap.X[:j]) + TOL
            for j in range(1, len(ap.X) + 1))
        if not promise:
            rep.skip(seed, f"{tag}: approximation promise not met pointwise (iteration {it})")
            return
        w = (tag, it, tuple(ex.X), tuple(ap.X))
        rep.record(seed, _is_prefix(ex.X, ap.X), len(ex.X), len(ap.X), witness=w,
                   note=f"{tag} containment")
        lo = len(ap.X) - len(ap.Y)
        rep.record(seed, lo <= len(ex.X) <= len(ap.X), len(ex.X), lo, witness=w,
                   note=f"{tag} stage-two reaches exact prefix")
        if r is not None:
            gap = len(set(ap.X) - set(ex.X))
            rep.record(seed, gap <= r, gap, r, witness=w, note=f"{tag} gap")
        if not ap.X:
            break
        S = ap.S


def check_routing_envelopes(seeds, max_points=12, max_vertices=10):
    """exact <= heuristic <= 2 exact for tours and trees; 2-opt never worsens."""
    rep = VerificationReport("routing-envelopes")
    for seed in seeds:
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, max_points + 1))
        points = PointSet(rng.random((m, 2)) * 10.0, rng.random(2) * 10.0, rng.uniform(0.1, 2.0))
        S = list(range(m))
        e, _ = exact_tsp(points, S)
        h, w = mst_double_tsp(points, S)
        rep.record(seed, e - TOL <= h <= 2 * e + TOL, h, 2 * e, witness=("mst-double", m))
        w2 = two_opt_improve(w, points)
        rep.record(seed, w2.travel <= h + TOL, w2.travel, h, witness=("two-opt", m))

        V = int(rng.integers(2, max_vertices + 1))
        while True:
            edges = [(u, v, float(rng.integers(1, 11)))
                     for u in range(V) for v in range(u + 1, V) if rng.random() < 0.5]
            g = WeightedGraph(V, edges)
            if g.connected(range(V)):
                break
        T = [v for v in range(1, V) if rng.random() < 0.6] or [V - 1]
        es, _ = exact_steiner(g, T)
        ks, _ = kmb_steiner(g, T)
        rep.record(seed, es - TOL <= ks <= 2 * es + TOL, ks, 2 * es, witness=("kmb", V, tuple(T)))
    return rep


def check_oracle(kind, seeds, n=8):
    """Audit a cost oracle against exact costs on every subset of small instances.

    Checks ``exact <= approx <= (1 + theta) * exact``.  Raw decreases along
    ``S -> S + x`` are counted as informational rows (the optimizer clamps
    them), never as violations.
    """
    rep = VerificationReport(f"oracle-check[{kind}]")
    mono = VerificationReport(f"monotonicity[{kind}]")
    for seed in seeds:
        if kind.startswith("tsp"):
            oracle = small_tour_instance(n, seed, kind=kind).cost
        else:
            oracle = small_tree_instance(n, seed, kind=kind)[0].cost
        exact = exact_cost_table(oracle)
        approx = np.array([oracle.cost(_lex_key(m, n)) for m in range(1 << n)])
        ratio = np.divide(approx, exact, out=np.ones_like(approx), where=exact > 0)
        worst = int(ratio.argmax())
        ok = bool(np.all(approx >= exact - TOL)
                  and np.all(approx <= (1 + oracle.theta) * exact + TOL))
        rep.record(seed, ok, float(ratio[worst]), 1.0 + oracle.theta,
                   witness=_lex_key(worst, n))
        masks = np.arange(1 << n)
        drops = 0
        for i in range(n):
            lo = masks[(masks >> i) & 1 == 0]
            drops += int(np.count_nonzero(approx[lo | (1 << i)] < approx[lo] - TOL))
        mono.rows.append((seed, drops == 0, float(drops), 0.0))
        mono.checked += 1
    return rep, mono


def run_suite(n=8, seeds=300, jobs=1):
    """Every check at the given scale; returns a list of reports."""
    seed_list = list(range(seeds))
    tasks = [
        (check_bicriterion, (seed_list,), {"n": n}),
        (check_usm, (list(range(max(seeds, 500))),), {}),
        (check_prefix_theorems, (seed_list[:max(1, min(seeds, 200))],),
         {"n": min(n, 9), "tree_seeds": seed_list[:50]}),
        (check_routing_envelopes, (seed_list[:max(1, min(seeds, 200))],), {}),
    ]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            futs = [ex.submit(fn, *a, **kw) for fn, a, kw in tasks]
            reports = [f.result() for f in futs]
    else:
        reports = [fn(*a, **kw) for fn, a, kw in tasks]
    reports.extend(submodularity_reports(seed_list[:20]))
    return reports


def submodularity_reports(seeds, n=6):
    reports = {}
    for seed in seeds:
        rng = np.random.default_rng(seed)
        sim = SimilarityMatrix.from_features(rng.random((n, 4)))
        A = rng.normal(size=(n, n + 2))
        oracles = {
            "cut-diversity(lambda=0.5)": CutDiversity(sim, 0.5),
            "cut-diversity(lambda=1)": CutDiversity(sim, 1.0),
            "summarization-diversity": SummarizationDiversity(sim),
            "mutual-information": MutualInformation(A @ A.T / (n + 2) + 0.1 * np.eye(n)),
        }
        for label, o in oracles.items():
            r = check_submodularity(o)
            agg = reports.setdefault(label, VerificationReport(f"submodularity[{label}]"))
            agg.checked += r.checked
            agg.rows.append((seed, r.passed, float(len(r.violations)), 0.0))
            agg.violations.extend(Violation(seed, v.witness, v.lhs, v.rhs) for v in r.violations)
    return list(reports.values())
