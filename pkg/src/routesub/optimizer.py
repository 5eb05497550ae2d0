"""Iterated two-stage greedy for submodular maximization under a routing budget.

Each of ``k`` iterations grows a sequence greedily by marginal gain while the
(approximate) route cost stays within ``(1 + theta) * budget`` (stage one),
then runs the deterministic double-greedy USM on that sequence and on each
prefix obtained by stripping the items admitted beyond ``budget`` (stage two).
Items admitted in one iteration are not offered to later ones.  The best
candidate over all iterations is returned.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .objectives import ObjectiveOracle, gain, safe_value
from .errors import ParameterError
from .routing import EMPTY, CostOracle, RouteWitness

log = logging.getLogger(__name__)

BUDGET_TOL = 1e-9


def default_k(n):
    if n < 1:
        raise ParameterError("n must be positive")
    return math.isqrt(n - 1) + 1


@dataclass
class Instance:
    objective: ObjectiveOracle
    cost: CostOracle
    budget: float
    theta: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.objective.n != self.cost.n:
            raise ParameterError(f"objective has {self.objective.n} items but cost oracle has "
                                 f"{self.cost.n}")
        if not self.budget > 0:
            raise ParameterError(f"budget must be positive, got {self.budget}")
        if self.theta is None:
            self.theta = self.cost.theta
        if self.theta < 0 or self.theta < self.cost.theta - 1e-12:
            raise ParameterError(f"theta={self.theta} is below the oracle's declared error "
                                 f"{self.cost.theta}")
        if self.k is None:
            self.k = default_k(self.n)
        if int(self.k) < 1:
            raise ParameterError("k must be at least 1")
        self.k = int(self.k)

    @property
    def n(self):
        return self.objective.n

    @property
    def relaxed_budget(self):
        return (1.0 + self.theta) * self.budget


@dataclass
class StageOneState:
    """Output of one greedy growth.

    ``X`` is the admitted sequence, ``Y`` its suffix admitted after the cost
    first exceeded the budget, ``S`` the items left over.  ``costs[j]`` and
    ``witnesses[j]`` describe the prefix ``X[:j]`` (clamped chain cost and the
    raw route found for it).
    """

    X: list = field(default_factory=list)
    Y: list = field(default_factory=list)
    S: list = field(default_factory=list)
    gains: list = field(default_factory=list)
    costs: list = field(default_factory=lambda: [0.0])
    raw_costs: list = field(default_factory=lambda: [0.0])
    witnesses: list = field(default_factory=lambda: [EMPTY])


@dataclass(frozen=True)
class Candidate:
    items: frozenset
    value: float
    cost: float
    witness: RouteWitness
    iteration: int
    prefix_len: int


@dataclass
class IterationRecord:
    iteration: int
    offered: list
    stage: StageOneState
    prefix_lengths: list


@dataclass
class Solution:
    algorithm: str
    selected: tuple
    value: float
    cost: float
    budget: float
    theta: float
    witness: RouteWitness
    f_calls: int
    rho_calls: int
    pool_size: int = 0
    candidates: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def over_budget_ratio(self):
        return max(0.0, self.cost / self.budget - 1.0)

    @property
    def travel(self):
        return self.witness.travel

    @property
    def collect(self):
        return self.witness.visiting

    def summary(self):
        return (f"{self.algorithm}: value={self.value:.6g} cost={self.cost:.6g} "
                f"budget={self.budget:g} over_budget={self.over_budget_ratio:.4f} "
                f"items={list(self.selected)} f_calls={self.f_calls} rho_calls={self.rho_calls} "
                f"pool={self.pool_size}")


def stage_one(S_i, instance, *, limit=None, budget=None, oracle=None, trace=None, iteration=1):
    """Greedy growth over ``S_i``.

    ``limit`` is the admission threshold (default ``(1 + theta) * budget``) and
    ``budget`` the threshold that marks items as over-budget.  Passing the exact
    oracle with ``limit=budget`` gives the exact-cost loop used by the prefix
    theorems.
    """
    f = instance.objective
    oracle = instance.cost if oracle is None else oracle
    limit = instance.relaxed_budget if limit is None else limit
    budget = instance.budget if budget is None else budget
    st = StageOneState(S=sorted(S_i))
    chain = oracle.chain()
    fX = safe_value(f, [])
    while st.S:
        best, best_gain, best_val = None, -math.inf, None
        for s in st.S:
            v = safe_value(f, st.X + [s])
            g = gain(v, fX)
            if g > best_gain:
                best, best_gain, best_val = s, g, v
        if best is None:
            break
        cost, raw, w = chain.probe(best)
        if cost > limit:
            break
        chain.push(best, cost, raw, w)
        st.X.append(best)
        st.S.remove(best)
        st.gains.append(best_gain)
        st.costs.append(cost)
        st.raw_costs.append(raw)
        st.witnesses.append(w)
        fX = best_val
        over = cost > budget
        if over:
            st.Y.append(best)
        if trace:
            trace(f"iter {iteration} | item {best} | gain {best_gain:.6g} | cost {cost:.6g} | "
                  f"over_budget {int(over)}")
    return st


def deterministic_usm(X, oracle):
    """Double greedy over ``X`` in the given order.

    Returns ``(selected, value)``.  Uses ``2 * len(X) + 2`` evaluations.
    """
    X = list(X)
    lo, hi = [], list(X)
    f_lo = safe_value(oracle, lo)
    f_hi = safe_value(oracle, hi)
    for u in X:
        v_add = safe_value(oracle, lo + [u])
        rest = [x for x in hi if x != u]
        v_drop = safe_value(oracle, rest)
        a = gain(v_add, f_lo)
        b = gain(v_drop, f_hi)
        if a >= b:
            lo.append(u)
            f_lo = v_add
        else:
            hi = rest
            f_hi = v_drop
    return lo, f_lo


def _candidate_cost(oracle, T, prefix_witness):
    raw, w = oracle.route_cost(T)
    if not T:
        return 0.0, EMPTY
    # a route for the prefix also serves any subset of it
    r = oracle.restrict(prefix_witness, T) if prefix_witness.items else w
    return (r.total, r) if r.total < raw else (raw, w)


def solve(instance, trace=None):
    """Run the iterated two-stage greedy on ``instance``; returns a Solution."""
    f, rho = instance.objective, instance.cost
    f0, r0 = f.calls, rho.calls
    relaxed = instance.relaxed_budget
    warnings = []

    S = []
    for s in range(instance.n):
        if rho.cost([s]) <= relaxed:
            S.append(s)
        else:
            warnings.append(f"item {s} excluded: singleton cost exceeds the relaxed budget")
    for msg in warnings:
        log.warning(msg)

    pool = {}
    iterations = []
    for i in range(1, instance.k + 1):
        offered = list(S)
        st = stage_one(S, instance, trace=trace, iteration=i)
        if not st.X:
            break
        m = len(st.X)
        lengths = list(range(m, m - len(st.Y) - 1, -1))
        for L in lengths:
            T, value = deterministic_usm(st.X[:L], f)
            key = frozenset(T)
            if key not in pool:
                cost, w = _candidate_cost(rho, sorted(key), st.witnesses[L])
                pool[key] = Candidate(key, value, cost, w, i, L)
            if trace:
                trace(f"iter {i} | prefix_len {L} | value {value:.6g}")
        iterations.append(IterationRecord(i, offered, st, lengths))
        S = st.S

    for c in pool.values():
        if c.cost > relaxed + BUDGET_TOL:
            raise RuntimeError(f"candidate {sorted(c.items)} costs {c.cost} > relaxed budget "
                               f"{relaxed}")

    if pool:
        best = max(pool.values(), key=lambda c: c.value)
        selected = tuple(sorted(best.items))
        value, cost, witness = best.value, best.cost, best.witness
    else:
        if not S:
            warnings.append("no item fits the relaxed budget")
        selected, value, cost, witness = (), safe_value(f, []), 0.0, EMPTY

    return Solution("ours", selected, value, cost, instance.budget, instance.theta, witness,
                    f.calls - f0, rho.calls - r0, len(pool), list(pool.values()), iterations,
                    warnings)
