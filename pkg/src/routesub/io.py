"""Plain-text file formats: matrices, graphs, point sets, key=value configs.

Matrix:  ``n`` then n rows of n numbers.
Graph:   ``n m`` then m lines ``u v w`` (1-based; vertex 1 is the root).
Points:  ``n``, ``depot_x depot_y rate``, then n lines ``x y c_s``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParameterError
from .routing import PointSet, WeightedGraph


def _lines(path):
    text = Path(path).read_text()
    return [ln.split("#", 1)[0].strip() for ln in text.splitlines() if ln.split("#", 1)[0].strip()]


def _fmt(x):
    return repr(float(x))


def read_matrix(path):
    lines = _lines(path)
    if not lines:
        raise ParameterError(f"{path}: empty matrix file")
    n = int(lines[0])
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ParameterError(f"{path}: expected a {n}x{n} matrix")
    return np.array([[float(x) for x in r] for r in rows])


def write_matrix(path, a):
    a = np.asarray(a, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{a.shape[0]}\n")
        for row in a:
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def read_graph(path):
    lines = _lines(path)
    n, m = (int(x) for x in lines[0].split())
    body = lines[1:]
    if len(body) != m:
        raise ParameterError(f"{path}: header promises {m} edges, found {len(body)}")
    edges = []
    for ln in body:
        u, v, w = ln.split()
        edges.append((int(u) - 1, int(v) - 1, float(w)))
    return WeightedGraph(n, edges)


def write_graph(path, graph):
    edges = graph.edges()
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {len(edges)}\n")
        for u, v, w in edges:
            fh.write(f"{u + 1} {v + 1} {_fmt(w)}\n")


def read_points(path):
    """Returns ``(PointSet, visiting_costs)``."""
    lines = _lines(path)
    n = int(lines[0])
    dx, dy, rate = (float(x) for x in lines[1].split())
    rows = [ln.split() for ln in lines[2:]]
    if len(rows) != n or any(len(r) != 3 for r in rows):
        raise ParameterError(f"{path}: expected {n} lines of 'x y c_s'")
    arr = np.array([[float(x) for x in r] for r in rows]).reshape(n, 3)
    return PointSet(arr[:, :2], (dx, dy), rate), arr[:, 2]


def write_points(path, points, visiting):
    with open(path, "w") as fh:
        fh.write(f"{points.n}\n")
        fh.write(f"{_fmt(points.depot[0])} {_fmt(points.depot[1])} {_fmt(points.travel_rate)}\n")
        for (x, y), c in zip(points.coords, visiting):
            fh.write(f"{_fmt(x)} {_fmt(y)} {_fmt(c)}\n")


def read_keyvalue(path):
    out = {}
    for ln in _lines(path):
        if "=" not in ln:
            raise ParameterError(f"{path}: expected key=value, got {ln!r}")
        k, v = ln.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def write_keyvalue(path, mapping):
    with open(path, "w") as fh:
        for k, v in mapping.items():
            fh.write(f"{k}={v}\n")


def parse_seeds(text):
    """``"1..20"`` (inclusive range), ``"3,5,8"``, or a bare count ``"20"`` (0..19)."""
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    if "," in text:
        return [int(x) for x in text.split(",") if x.strip()]
    return list(range(int(text)))


def parse_floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]
