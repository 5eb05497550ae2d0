import itertools

import numpy as np
import pytest

from routesub import Instance
from routesub.errors import SizeError
from routesub.objectives import (CutDiversity, SimilarityMatrix, Tabulated,
                                 check_submodularity)
from routesub.routing import PointSet, TabulatedCost, TourOracle
from routesub.verification import (PerturbedCost, brute_force_opt, check_bicriterion,
                                   check_oracle, check_prefix_theorems, check_routing_envelopes,
                                   check_usm, compute_k_parameter, exact_cost_table,
                                   random_submodular_table, small_tour_instance,
                                   small_tree_instance)


def flat_instance(weights, budget, visiting=1.0):
    n = len(weights)
    f = Tabulated.from_function(n, lambda S: float(sum(weights[i] for i in S)))
    return Instance(f, TabulatedCost(np.zeros(1 << n), n, [visiting] * n), budget)


def test_brute_force_budget_zero():
    inst = flat_instance([1, 2, 3], 1.0)
    assert brute_force_opt(inst, budget=0.0) == (frozenset(), 0.0)
    assert compute_k_parameter(inst, budget=0.0) == 1


def test_brute_force_unlimited_cut_diversity():
    rng = np.random.default_rng(0)
    sim = SimilarityMatrix.from_features(rng.random((6, 3)))
    f = CutDiversity(sim, 1.0)
    inst = Instance(f, TabulatedCost(np.zeros(64), 6, [1.0] * 6), 100.0)
    S, v = brute_force_opt(inst)
    best = max(f.evaluate(T) for r in range(7) for T in itertools.combinations(range(6), r))
    assert v == pytest.approx(best)
    assert f.evaluate(sorted(S)) == pytest.approx(best)


def test_brute_force_lexicographic_ties():
    inst = flat_instance([1, 1, 1], 1.0)
    assert brute_force_opt(inst) == (frozenset({0}), 1.0)


def test_k_parameter_symmetric_is_one():
    # unit costs and budget 3: every base has exactly 3 items
    assert compute_k_parameter(flat_instance([1] * 5, 3.0)) == 1


def test_k_parameter_mixed_bases():
    # one heavy item (cost 3) versus three light ones: bases {heavy}, {light x 3}
    n = 4
    inst = Instance(Tabulated(np.zeros(16), 4),
                    TabulatedCost(np.zeros(16), n, [3.0, 1.0, 1.0, 1.0]), 3.0)
    assert compute_k_parameter(inst) == 3


def test_k_parameter_range():
    for seed in range(10):
        inst = small_tour_instance(7, seed)
        k = compute_k_parameter(inst)
        assert 1 <= k <= inst.n - 1


def test_exact_table_matches_oracle():
    rng = np.random.default_rng(1)
    pts = PointSet(rng.random((6, 2)) * 5)
    oracle = TourOracle(pts, rng.uniform(0.1, 1, 6), kind="tsp-exact")
    table = exact_cost_table(oracle)
    for m in range(64):
        S = [i for i in range(6) if m >> i & 1]
        assert table[m] == pytest.approx(oracle.cost(S))


def test_exact_table_size_limits():
    pts = PointSet(np.random.default_rng(0).random((13, 2)))
    with pytest.raises(SizeError):
        exact_cost_table(TourOracle(pts, kind="tsp-exact"))


def test_perturbed_cost_envelope():
    inst = small_tour_instance(6, 0)
    exact = exact_cost_table(inst.cost)
    p = PerturbedCost(inst.cost, 0.3, seed=2)
    for m in range(64):
        S = [i for i in range(6) if m >> i & 1]
        assert exact[m] - 1e-9 <= p.cost(S) <= 1.3 * exact[m] + 1e-9


def test_random_tables_are_nonnegative_submodular():
    rng = np.random.default_rng(3)
    for _ in range(10):
        f = random_submodular_table(6, rng)
        assert f.values.min() >= 0
        assert check_submodularity(f).passed


def test_small_tree_instance_has_exact_companion():
    inst, exact = small_tree_instance(6, 0)
    assert exact.exact and inst.cost.theta == 1.0


def test_checks_pass_on_small_sweeps():
    assert check_bicriterion(range(10)).passed
    assert check_usm(range(30)).passed
    assert check_prefix_theorems(range(10), tree_seeds=range(3)).passed
    assert check_routing_envelopes(range(10)).passed


@pytest.mark.parametrize("kind", ["tsp-exact", "tsp-mst-double", "steiner-kmb", "steiner-exact"])
def test_oracle_check(kind):
    rep, mono = check_oracle(kind, range(3), n=6)
    assert rep.passed and rep.checked == 3
    if kind.endswith("exact"):
        assert all(row[1] for row in mono.rows)


def test_report_csv_rows():
    rep = check_usm(range(3))
    rows = list(rep.csv_rows())
    assert len(rows) == rep.checked
    assert all(r[0] == rep.name and r[2] in (0, 1) for r in rows)
    assert rep.summary().startswith("[PASS]")
