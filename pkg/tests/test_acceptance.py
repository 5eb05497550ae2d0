"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line.  Run directly
(``python3 tests/test_acceptance.py``) to get just those nine lines.
"""
import sys
import time

import numpy as np
import pytest

from routesub import solve
from routesub.harness import (DELAY_RANGE, POI_AREA, POI_BUDGET, POI_COUNT, POI_TRAVEL_RATE,
                              ScenarioConfig, check_budget_safety, gen_multicast_instance,
                              gen_poi_instance, poi_points, run_experiment)
from routesub.verification import (check_bicriterion, check_prefix_theorems,
                                   check_routing_envelopes, check_usm, submodularity_reports)

_capture = None


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    rep = check_bicriterion(range(300), n=8)
    dt = time.perf_counter() - t0
    return report(1, rep.passed and dt < 60,
                  f"bicriterion bound, 300 seeds n=8: {rep.checked} checks, "
                  f"{len(rep.violations)} violations, {dt:.1f}s (limit 60s)")


def criterion_2():
    t0 = time.perf_counter()
    rep = check_usm(range(500), n_max=12)
    dt = time.perf_counter() - t0
    return report(2, rep.passed and rep.checked == 500 and dt < 30,
                  f"USM >= 1/3 brute-force max on {rep.checked} tables, "
                  f"{len(rep.violations)} violations, {dt:.1f}s (limit 30s)")


def criterion_3():
    rep = check_prefix_theorems(range(200), n=8, regimes=("half", 1, 2, 3),
                                tree_seeds=range(50))
    return report(3, rep.passed,
                  f"prefix containment / gap theorems on 200 seeds: {rep.checked} checks, "
                  f"{len(rep.violations)} violations, {len(rep.skipped)} skipped")


def criterion_4():
    rep = check_routing_envelopes(range(200))
    return report(4, rep.passed and rep.checked == 600,
                  f"routing envelopes (KMB, MST-double, two-opt) x 200: "
                  f"{len(rep.violations)} violations")


def criterion_5():
    reports = submodularity_reports(range(20), n=6)
    names = sorted(r.name for r in reports)
    ok = all(r.passed for r in reports) and len(reports) == 4
    return report(5, ok, f"exhaustive submodularity n=6 on {', '.join(names)}: "
                         f"{sum(len(r.violations) for r in reports)} violations")


def criterion_6():
    seen = []
    ok = True
    cases = [("multicast", 20), ("poi", 45), ("multicast", 100)]
    for scenario, n in cases:
        for seed in range(3):
            inst = (gen_multicast_instance(n, seed) if scenario == "multicast"
                    else gen_poi_instance(seed))
            sol = solve(inst)
            fb, rb = 3 * inst.k * n * n, 3 * inst.k * n
            ok &= sol.f_calls <= fb and sol.rho_calls <= rb
            seen.append(f"n={n}: f {sol.f_calls}/{fb} rho {sol.rho_calls}/{rb}")
    return report(6, ok, "oracle counters within 3kn^2 / 3kn; seed 2 per size: "
                         + "; ".join(seen[2::3]))


def criterion_7():
    checks = []
    for seed in range(5):
        pts, collect = poi_points(seed)
        checks += [pts.n == POI_COUNT == 45,
                   bool(np.all((pts.coords >= 0) & (pts.coords <= np.array(POI_AREA)))),
                   POI_AREA == (35.0, 40.0),
                   pts.travel_rate == POI_TRAVEL_RATE == 0.6,
                   bool(np.all((collect > 0) & (collect < 2)))]
        inst = gen_multicast_instance(20, seed)
        W = inst.cost.graph.weights
        off = W[~np.eye(W.shape[0], dtype=bool)]
        checks += [DELAY_RANGE == (1, 200), off.min() >= 1, off.max() <= 200,
                   bool(np.all(off == np.round(off))), inst.objective.lam == 1.0]
    inst = gen_poi_instance(1)
    sol = solve(inst)
    checks += [POI_BUDGET == 120.0, inst.budget == 120.0,
               sol.cost <= inst.relaxed_budget + 1e-9, len(sol.selected) > 0]
    return report(7, all(checks),
                  f"scenario constants ({sum(checks)}/{len(checks)} checks); default budget 120 "
                  f"end-to-end value {sol.value:.4g}, cost {sol.cost:.4g}")


def _rand_decreases(budgets, seeds):
    cfg = ScenarioConfig("poi", budgets=budgets, seeds=seeds, algorithms=("rand",))
    recs = run_experiment(cfg)
    by_seed = {}
    for r in recs:
        by_seed.setdefault(r.seed, {})[r.budget] = r.value
    hits = [s for s, v in by_seed.items()
            if any(v[b2] < v[b1] for b1, b2 in zip(budgets, budgets[1:]))]
    return hits, by_seed


def criterion_8():
    budgets = [240.0, 320.0, 400.0]
    hits, by_seed = _rand_decreases(budgets, list(range(1, 21)))
    values = sorted({round(v, 12) for d in by_seed.values() for v in d.values()})
    # informational only: the same turn-down at budgets below the full-tour cost
    low, _ = _rand_decreases([100.0, 160.0, 240.0], list(range(1, 21)))
    return report(8, len(hits) >= 1,
                  f"Rand MI strict decrease over budgets 240/320/400 on {len(hits)}/20 seeds "
                  f"(distinct values seen: {values[:5]}); info: at 100/160/240 "
                  f"{len(low)}/20 seeds decrease")


def criterion_9():
    recs = run_experiment(ScenarioConfig("poi", budgets=[100.0, 160.0, 240.0, 320.0],
                                         seeds=list(range(1, 21))))
    recs += run_experiment(ScenarioConfig("multicast", n=20, budgets=[50.0, 100.0, 200.0],
                                          seeds=list(range(1, 21))))
    rep = check_budget_safety(recs)
    errors = sum(1 for r in recs if r.error)
    return report(9, rep.passed and errors == 0 and rep.checked == len(recs),
                  f"budget safety on {rep.checked} benchmark records, "
                  f"{len(rep.violations)} violations, {errors} failed runs")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


def test_criterion_1_bicriterion():
    assert criterion_1()


def test_criterion_2_usm_third():
    assert criterion_2()


def test_criterion_3_prefix_theorems():
    assert criterion_3()


def test_criterion_4_routing_envelopes():
    assert criterion_4()


def test_criterion_5_submodularity():
    assert criterion_5()


def test_criterion_6_oracle_counters():
    assert criterion_6()


def test_criterion_7_scenario_constants():
    assert criterion_7()


def test_criterion_8_rand_nonmonotone():
    assert criterion_8()


def test_criterion_9_budget_safety():
    assert criterion_9()


if __name__ == "__main__":
    sys.exit(0 if all([c() for c in CRITERIA]) else 1)
