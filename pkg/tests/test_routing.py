import itertools

import numpy as np
import pytest

from routesub.errors import PreconditionError, SizeError
from routesub.routing import (DEPOT, EMPTY, PointSet, TabulatedCost, TourOracle, TreeOracle,
                              WeightedGraph, exact_steiner, exact_tsp, kmb_steiner,
                              mst_double_tsp, two_opt_improve, witness_valid)
from routesub.routing.tsp import exact_tour, tour_length, two_opt


def brute_tour(D):
    m = D.shape[0] - 1
    best = np.inf
    for perm in itertools.permutations(range(1, m + 1)):
        best = min(best, tour_length(D, (0,) + perm + (0,)))
    return best


def brute_steiner(graph, terminals):
    """Cheapest connected edge subset spanning the terminals."""
    edges = graph.edges()
    best = np.inf
    for r in range(len(edges) + 1):
        for sub in itertools.combinations(edges, r):
            w = sum(e[2] for e in sub)
            if w >= best:
                continue
            g = WeightedGraph(graph.n, sub)
            if g.connected(terminals):
                best = w
    return best


def test_single_point_tour_cost():
    pts = PointSet(np.array([[3.0, 4.0]]), (0.0, 0.0), 1.0)
    oracle = TourOracle(pts, [1.0], kind="tsp-exact")
    assert oracle.cost([0]) == pytest.approx(11.0)
    total, w = oracle.route_cost([])
    assert total == 0.0 and w is EMPTY


def test_collinear_tour():
    pts = PointSet(np.array([[1.0, 0.0], [2.0, 0.0]]), (0.0, 0.0), 1.0)
    cost, w = exact_tsp(pts, [0, 1])
    assert cost == pytest.approx(4.0)
    assert w.tour[0] == DEPOT and w.tour[-1] == DEPOT
    assert exact_tsp(pts, [])[0] == 0.0


def test_exact_tour_matches_permutations():
    rng = np.random.default_rng(0)
    for m in range(1, 8):
        P = rng.random((m + 1, 2))
        D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
        length, tour = exact_tour(D)
        assert length == pytest.approx(brute_tour(D))
        assert tour_length(D, tour) == pytest.approx(length)
        assert sorted(tour[1:-1]) == list(range(1, m + 1))


def test_exact_tsp_size_limit():
    pts = PointSet(np.random.default_rng(0).random((16, 2)))
    with pytest.raises(SizeError):
        exact_tsp(pts, range(16))


def test_mst_double_single_point_equals_exact():
    pts = PointSet(np.array([[3.0, 4.0]]))
    assert mst_double_tsp(pts, [0])[0] == pytest.approx(exact_tsp(pts, [0])[0])
    assert mst_double_tsp(pts, [])[0] == 0.0


def test_mst_double_within_twice_exact():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pts = PointSet(rng.random((10, 2)) * 10)
        e = exact_tsp(pts, range(10))[0]
        h = mst_double_tsp(pts, range(10))[0]
        assert e - 1e-9 <= h <= 2 * e + 1e-9


def test_two_opt_triangle_unchanged():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
    length, tour = two_opt(D, [0, 1, 2, 0])
    assert length == pytest.approx(tour_length(D, [0, 1, 2, 0]))


def test_two_opt_uncrosses_square():
    P = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
    crossing = [0, 1, 2, 3, 0]
    length, tour = two_opt(D, crossing)
    assert length < tour_length(D, crossing) - 1e-9
    assert length == pytest.approx(4.0)
    assert sorted(tour) == sorted(crossing)


def test_two_opt_improve_witness_keeps_items():
    rng = np.random.default_rng(2)
    pts = PointSet(rng.random((9, 2)) * 10)
    h, w = mst_double_tsp(pts, range(9))
    w2 = two_opt_improve(w, pts)
    assert w2.travel <= h + 1e-9
    assert sorted(w2.tour) == sorted(w.tour)


def path_graph():
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])


def test_steiner_trivial_cases():
    g = path_graph()
    assert kmb_steiner(g, [])[0] == 0.0
    assert kmb_steiner(g, [0])[0] == 0.0
    assert exact_steiner(g, [0])[0] == 0.0
    assert exact_steiner(g, [2])[0] == pytest.approx(2.0)
    assert kmb_steiner(g, [2])[0] == pytest.approx(2.0)


def test_single_vertex_tree_is_shortest_path():
    rng = np.random.default_rng(3)
    W = np.triu(rng.integers(1, 10, (6, 6)).astype(float), 1)
    g = WeightedGraph.complete(W + W.T)
    for v in range(1, 6):
        assert kmb_steiner(g, [v])[0] == pytest.approx(g.dist[0, v])


def test_kmb_equals_exact_on_unit_five_vertex_graphs():
    pairs = list(itertools.combinations(range(5), 2))
    checked = 0
    for bits in range(1 << len(pairs)):
        edges = [(u, v, 1.0) for j, (u, v) in enumerate(pairs) if bits >> j & 1]
        g = WeightedGraph(5, edges)
        if not g.connected(range(5)):
            continue
        for S in itertools.combinations(range(1, 5), 3):
            assert kmb_steiner(g, S)[0] == pytest.approx(exact_steiner(g, S)[0])
            checked += 1
    assert checked > 0


def test_steiner_against_edge_subset_brute_force():
    rng = np.random.default_rng(4)
    done = 0
    while done < 15:
        edges = [(u, v, float(rng.integers(1, 4))) for u, v in itertools.combinations(range(6), 2)
                 if rng.random() < 0.45]
        g = WeightedGraph(6, edges)
        if not g.connected(range(6)):
            continue
        S = [v for v in range(1, 6) if rng.random() < 0.6] or [5]
        e = exact_steiner(g, S)[0]
        assert e == pytest.approx(brute_steiner(g, [0] + S))
        k = kmb_steiner(g, S)[0]
        assert e - 1e-9 <= k <= 2 * e + 1e-9
        done += 1


def test_tree_oracle_witness_valid():
    rng = np.random.default_rng(5)
    W = np.triu(rng.integers(1, 20, (8, 8)).astype(float), 1)
    g = WeightedGraph.complete(W + W.T)
    for kind in ("steiner-kmb", "steiner-exact"):
        oracle = TreeOracle(g, np.zeros(7), kind=kind)
        for S in ([0], [1, 3], [0, 2, 4, 6]):
            total, w = oracle.route_cost(S)
            assert witness_valid(oracle, w, S)


def test_tour_oracle_kinds_and_caching():
    rng = np.random.default_rng(6)
    pts = PointSet(rng.random((7, 2)) * 10, (0.0, 0.0), 0.6)
    visit = rng.uniform(0.1, 2, 7)
    exact = TourOracle(pts, visit, kind="tsp-exact")
    approx = TourOracle(pts, visit, kind="tsp-mst-double")
    assert exact.theta == 0.0 and approx.theta == 1.0
    for S in ([0], [1, 2, 5], range(7)):
        e, a = exact.cost(S), approx.cost(S)
        assert e - 1e-9 <= a <= 2 * e + 1e-9
        assert witness_valid(approx, approx.route_cost(S)[1], S)
    calls = exact.calls
    exact.cost([1, 2, 5])
    assert exact.calls == calls + 1 and exact.cache_hits >= 1


def test_energy_split_sums_to_total():
    pts = PointSet(np.array([[3.0, 4.0], [6.0, 8.0]]), (0.0, 0.0), 0.5)
    oracle = TourOracle(pts, [1.0, 2.0], kind="tsp-exact")
    total, w = oracle.route_cost([0, 1])
    assert w.travel == pytest.approx(0.5 * 20.0)
    assert w.visiting == pytest.approx(3.0)
    assert total == pytest.approx(w.travel + w.visiting)


def test_marginal_cost_examples():
    pts = PointSet(np.array([[3.0, 4.0], [3.0, 4.0]]), (0.0, 0.0), 1.0)
    oracle = TourOracle(pts, [1.0, 1.0], kind="tsp-exact")
    assert oracle.marginal_cost([], 0) == pytest.approx(11.0)
    # raw difference is 0 here (route shrinks by 1, visiting adds 1), floored at c_min
    table = TabulatedCost([0.0, 5.0, 5.0, 4.0], 2, visiting_costs=[1.0, 1.0])
    assert table.marginal_cost([0], 1) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        oracle.marginal_cost([0], 0)


def test_exact_marginals_at_least_c_min():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = 7
        pts = PointSet(rng.random((n, 2)) * 10)
        oracle = TourOracle(pts, rng.uniform(0.5, 1.5, n), kind="tsp-exact")
        for m in range(1 << n):
            S = [i for i in range(n) if m >> i & 1]
            for x in range(n):
                if not m >> x & 1:
                    raw = oracle.cost(S + [x]) - oracle.cost(S)
                    assert raw >= oracle.c_min - 1e-9


def test_chain_clamp():
    table = TabulatedCost([0.0, 5.0, 5.0, 4.0], 2, visiting_costs=[1.0, 1.0])
    chain = table.chain()
    c, raw, w = chain.probe(0)
    chain.push(0, c, raw, w)
    c2, raw2, _ = chain.probe(1)
    assert raw2 == pytest.approx(6.0)
    assert c2 == pytest.approx(7.0)   # clamped to prev + c_min
