"""Instance generators for the multicast and data-collection case studies.

Every generator is a pure function of its arguments (seeded numpy Generator).
Instances can be written to a directory and read back through a small
``instance.txt`` manifest.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import io
from ..errors import ParameterError
from ..objectives import CovarianceMatrix, CutDiversity, MutualInformation, SimilarityMatrix
from ..optimizer import Instance
from ..routing import PointSet, TourOracle, TreeOracle, WeightedGraph

DELAY_RANGE = (1, 200)
RATING_RANK = 5
RATING_SCALE = 10.0

POI_COUNT = 45
POI_AREA = (35.0, 40.0)
POI_DEPOT = (0.0, 0.0)
POI_TRAVEL_RATE = 0.6
POI_COLLECT_MAX = 2.0
POI_BUDGET = 120.0
KERNEL_VARIANCE = 1.0
KERNEL_LENGTH = 8.0
POI_EXACT_BELOW = 15

MULTICAST_BUDGET = 100.0


def multicast_graph(n, rng):
    """Complete graph on the root (vertex 0) plus n processors, integer delays."""
    lo, hi = DELAY_RANGE
    V = n + 1
    W = rng.integers(lo, hi + 1, size=(V, V)).astype(float)
    W = np.triu(W, 1)
    W = W + W.T
    return WeightedGraph.complete(W)


def rating_similarity(n, rng):
    """Inner products of synthetic nonnegative rank-5 movie factors."""
    F = rng.random((n, RATING_RANK)) * RATING_SCALE
    return SimilarityMatrix.from_features(F)


def gen_multicast_instance(n, seed, budget=MULTICAST_BUDGET, lam=1.0, theta=None, k=None,
                           oracle="steiner-kmb"):
    if n < 2:
        raise ParameterError("multicast scenario needs at least 2 processors")
    rng = np.random.default_rng(seed)
    graph = multicast_graph(n, rng)
    sim = rating_similarity(n, rng)
    cost = TreeOracle(graph, np.zeros(n), kind=oracle)
    return Instance(CutDiversity(sim, lam), cost, budget, theta=theta, k=k)


def se_kernel(points, variance=KERNEL_VARIANCE, length=KERNEL_LENGTH):
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(-1)
    return variance * np.exp(-d2 / (2.0 * length ** 2))


def poi_points(seed, n=POI_COUNT):
    """PoI coordinates, PointSet and per-PoI collection energies."""
    rng = np.random.default_rng(seed)
    coords = rng.random((n, 2)) * np.array(POI_AREA)
    collect = rng.uniform(np.nextafter(0.0, 1.0), POI_COLLECT_MAX, n)
    return PointSet(coords, POI_DEPOT, POI_TRAVEL_RATE), collect


def gen_poi_instance(seed, budget=POI_BUDGET, theta=None, k=None, n=POI_COUNT,
                     oracle="tsp-two-opt", covariance=None):
    points, collect = poi_points(seed, n)
    B = se_kernel(points.coords) if covariance is None else np.asarray(covariance, dtype=float)
    exact_below = POI_EXACT_BELOW if oracle != "tsp-exact" else None
    cost = TourOracle(points, collect, kind=oracle, exact_below=exact_below)
    return Instance(MutualInformation(CovarianceMatrix(B)), cost, budget, theta=theta, k=k)


def gen_instance(scenario, n=None, seed=0, **kw):
    if scenario == "multicast":
        return gen_multicast_instance(20 if n is None else n, seed, **kw)
    if scenario == "poi":
        return gen_poi_instance(seed, n=POI_COUNT if n is None else n, **kw)
    raise ParameterError(f"unknown scenario {scenario!r}")


def write_instance(out_dir, instance, scenario, seed):
    """Write data files plus ``instance.txt``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cost, f = instance.cost, instance.objective
    manifest = {"scenario": scenario, "seed": seed, "budget": repr(instance.budget),
                "theta": repr(instance.theta), "k": instance.k, "oracle": cost.kind}
    if isinstance(cost, TreeOracle):
        io.write_graph(out / "graph.txt", cost.graph)
        io.write_matrix(out / "similarity.txt", f.sim.entries)
        manifest.update(graph="graph.txt", matrix="similarity.txt", objective="cut-diversity",
                        **{"lambda": repr(f.lam)})
    else:
        io.write_points(out / "points.txt", cost.points, cost.visiting_costs)
        io.write_matrix(out / "covariance.txt", f.cov.entries)
        manifest.update(points="points.txt", matrix="covariance.txt",
                        objective="mutual-information")
        if cost.exact_below is not None:
            manifest["exact_below"] = cost.exact_below
    path = out / "instance.txt"
    io.write_keyvalue(path, manifest)
    return path


def load_instance(manifest_path, budget=None, theta=None, k=None, oracle=None):
    """Rebuild an Instance from a manifest; keyword overrides win."""
    path = Path(manifest_path)
    m = io.read_keyvalue(path)
    base = path.parent
    kind = oracle or m.get("oracle")
    matrix = io.read_matrix(base / m["matrix"])
    if "graph" in m:
        graph = io.read_graph(base / m["graph"])
        cost = TreeOracle(graph, np.zeros(graph.n - 1), kind=kind or "steiner-kmb")
        if m.get("objective", "cut-diversity") != "cut-diversity":
            raise ParameterError(f"unsupported objective {m['objective']!r} for graph instances")
        f = CutDiversity(SimilarityMatrix(matrix), float(m.get("lambda", 1.0)))
    else:
        points, collect = io.read_points(base / m["points"])
        eb = m.get("exact_below")
        cost = TourOracle(points, collect, kind=kind or "tsp-two-opt",
                          exact_below=int(eb) if eb and kind != "tsp-exact" else None)
        f = MutualInformation(CovarianceMatrix(matrix))
    if theta is None:
        theta = float(m["theta"]) if "theta" in m and float(m["theta"]) >= cost.theta else None
    k = k if k is not None else (None if m.get("k", "auto") == "auto" else int(m["k"]))
    budget = float(m["budget"]) if budget is None else budget
    return Instance(f, cost, budget, theta=theta, k=k)
