from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import io
from .._report import VerificationReport
from ..baselines import rand_baseline, rmax_baseline
from ..errors import ParameterError
from ..optimizer import solve
from .scenarios import MULTICAST_BUDGET, POI_BUDGET, gen_instance

log = logging.getLogger(__name__)

ALGORITHMS = ("ours", "rand", "rmax")
BUDGET_TOL = 1e-9


@dataclass
class ScenarioConfig:
    scenario: str = "poi"
    n: int | None = None
    budgets: list = field(default_factory=lambda: [POI_BUDGET])
    theta: float | None = None
    k: int | str = "auto"
    seeds: list = field(default_factory=lambda: list(range(1, 21)))
    lam: float = 1.0
    algorithms: tuple = ALGORITHMS
    oracle: str | None = None

    def __post_init__(self):
        if self.scenario not in ("poi", "multicast"):
            raise ParameterError(f"unknown scenario {self.scenario!r}")
        self.budgets = [float(b) for b in self.budgets]
        if not self.budgets or any(b <= 0 for b in self.budgets):
            raise ParameterError("budgets must be positive and nonempty")
        if not self.seeds:
            raise ParameterError("at least one seed is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ParameterError(f"unknown algorithm {a!r}")

    @property
    def loop_k(self):
        return None if self.k in (None, "auto") else int(self.k)

    @classmethod
    def from_mapping(cls, m):
        kw = {}
        if "scenario" in m:
            kw["scenario"] = m["scenario"]
        if "n" in m:
            kw["n"] = int(m["n"])
        if "budgets" in m or "budget" in m:
            kw["budgets"] = io.parse_floats(m.get("budgets", m.get("budget")))
        elif m.get("scenario") == "multicast":
            kw["budgets"] = [MULTICAST_BUDGET]
        if "theta" in m:
            kw["theta"] = float(m["theta"])
        if "k" in m:
            kw["k"] = m["k"] if m["k"] == "auto" else int(m["k"])
        if "seeds" in m:
            kw["seeds"] = io.parse_seeds(m["seeds"])
        if "lambda" in m:
            kw["lam"] = float(m["lambda"])
        if "algos" in m:
            kw["algorithms"] = tuple(a.strip() for a in m["algos"].split(",") if a.strip())
        if "oracle" in m:
            kw["oracle"] = m["oracle"]
        return cls(**kw)

    @classmethod
    def from_file(cls, path):
        return cls.from_mapping(io.read_keyvalue(path))


@dataclass
class RunRecord:
    algo: str
    seed: int
    budget: float
    value: float
    cost: float
    over_budget: float
    items: tuple
    travel_energy: float
    collect_energy: float
    f_calls: int
    rho_calls: int
    ms: float
    theta: float = 0.0
    error: str = ""

    @property
    def sort_key(self):
        return (self.algo, self.seed, self.budget)


def make_instance(config, seed, budget):
    kw = {"budget": budget, "theta": config.theta, "k": config.loop_k}
    if config.oracle:
        kw["oracle"] = config.oracle
    if config.scenario == "multicast":
        kw["lam"] = config.lam
    return gen_instance(config.scenario, n=config.n, seed=seed, **kw)


def _record(algo, seed, budget, sol, ms, theta):
    return RunRecord(algo, seed, budget, sol.value, sol.cost, sol.over_budget_ratio,
                     tuple(sol.selected), sol.travel, sol.collect, sol.f_calls, sol.rho_calls,
                     ms, theta)


def _run_seed(config, seed):
    records = []
    base = make_instance(config, seed, config.budgets[0])
    for budget in config.budgets:
        # share objective and cost caches across budgets for one seed
        base.budget = budget
        for algo in config.algorithms:
            t0 = time.perf_counter()
            try:
                if algo == "ours":
                    sol = solve(base)
                elif algo == "rand":
                    sol = rand_baseline(base, seed)
                else:
                    sol = rmax_baseline(base)
            except Exception as exc:  # recorded, not fatal
                log.error("%s seed=%s budget=%s failed: %s", algo, seed, budget, exc)
                records.append(RunRecord(algo, seed, budget, float("nan"), float("nan"),
                                         float("nan"), (), float("nan"), float("nan"), 0, 0,
                                         0.0, base.theta, error=str(exc)))
                continue
            ms = (time.perf_counter() - t0) * 1000.0
            records.append(_record(algo, seed, budget, sol, ms,
                                   base.theta if algo == "ours" else 0.0))
    return records


def run_experiment(config, jobs=1):
    """One RunRecord per (algorithm, seed, budget), sorted by that key.

    Each seed is its own instance; Rand is seeded with the same seed, so the
    seeds double as Rand's replicates for the error band.
    """
    if not config.algorithms:
        return []
    if jobs > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            chunks = list(ex.map(_run_seed, [config] * len(config.seeds), config.seeds))
    else:
        chunks = [_run_seed(config, s) for s in config.seeds]
    records = sorted((r for c in chunks for r in c), key=lambda r: r.sort_key)
    _log_dominance(records)
    return records


def check_budget_safety(records):
    """Ours stays within theta over budget; baselines never exceed it."""
    rep = VerificationReport("budget-safety")
    for r in records:
        if r.error:
            continue
        limit = r.theta if r.algo == "ours" else 0.0
        rep.record(r.seed, r.over_budget <= limit + BUDGET_TOL, r.over_budget, limit,
                   witness=(r.algo, r.budget))
    return rep


def energy_identity(records, tol=1e-9):
    return all(abs(r.travel_energy + r.collect_energy - r.cost) <= tol
               for r in records if not r.error)


def _log_dominance(records):
    cells = {}
    for r in records:
        if not r.error:
            cells.setdefault((r.budget, r.algo), []).append(r.value)
    for (budget, algo), vals in sorted(cells.items()):
        if algo != "ours" or (budget, "rand") not in cells:
            continue
        ours, rand = np.mean(vals), np.mean(cells[(budget, "rand")])
        if ours < rand:
            log.warning("budget %g: ours mean %.4g below rand mean %.4g", budget, ours, rand)
