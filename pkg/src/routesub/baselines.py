"""Comparison heuristics: random fill and benefit/cost-ratio greedy.

Both admit an item only if the route cost stays within the original budget.
"""
from __future__ import annotations

import math

import numpy as np

from .objectives import gain, safe_value
from .optimizer import Solution
from .routing import EMPTY


def _solution(tag, instance, X, f0, r0):
    f, rho = instance.objective, instance.cost
    cost, w = rho.route_cost(X) if X else (0.0, EMPTY)
    value = safe_value(f, X)
    return Solution(tag, tuple(sorted(X)), value, cost, instance.budget, 0.0, w,
                    f.calls - f0, rho.calls - r0)


def rand_baseline(instance, seed=0, trace=None):
    """Add items in a random order; stop at the first one that breaks the budget."""
    f, rho = instance.objective, instance.cost
    f0, r0 = f.calls, rho.calls
    order = np.random.default_rng(seed).permutation(instance.n)
    X = []
    for x in order:
        x = int(x)
        c = rho.cost(X + [x])
        if c > instance.budget:
            break
        X.append(x)
        if trace:
            trace(f"rand | item {x} | cost {c:.6g}")
    return _solution("rand", instance, X, f0, r0)


def rmax_baseline(instance, trace=None):
    """Greedy on marginal gain per marginal route cost.

    Stops when nothing affordable remains or the chosen item's gain is not
    positive.  Marginal costs are floored at ``c_min`` (or a tiny epsilon when
    every visiting cost is zero) so the ratio is always finite.
    """
    f, rho = instance.objective, instance.cost
    f0, r0 = f.calls, rho.calls
    floor = rho.marginal_floor
    X, remaining = [], list(range(instance.n))
    fX, cX = safe_value(f, []), 0.0
    while remaining:
        best = None
        best_ratio = -math.inf
        for x in remaining:
            c = rho.cost(X + [x])
            if c > instance.budget:
                continue
            v = safe_value(f, X + [x])
            g = gain(v, fX)
            ratio = g / max(c - cX, floor)
            if ratio > best_ratio:
                best, best_ratio, best_gain, best_v, best_c = x, ratio, g, v, c
        if best is None or best_gain <= 0:
            break
        X.append(best)
        remaining.remove(best)
        fX, cX = best_v, best_c
        if trace:
            trace(f"rmax | item {best} | gain {best_gain:.6g} | cost {best_c:.6g}")
    return _solution("rmax", instance, X, f0, r0)
