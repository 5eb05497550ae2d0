"""CSV and SVG emission for benchmark records."""
from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CSV_HEADER = ("algo", "seed", "budget", "value", "cost", "over_budget", "items",
              "travel_energy", "collect_energy", "f_calls", "rho_calls", "ms")
ALGO_STYLE = {"ours": ("tab:blue", "o"), "rand": ("tab:gray", "s"), "rmax": ("tab:orange", "^")}

# fixed ids and no date stamp so identical records give identical SVG bytes
plt.rcParams["svg.hashsalt"] = "routesub"


def _num(x):
    return repr(float(x))


def csv_text(records):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(records, key=lambda r: r.sort_key):
        w.writerow([r.algo, r.seed, _num(r.budget), _num(r.value), _num(r.cost),
                    _num(r.over_budget), " ".join(str(i) for i in r.items),
                    _num(r.travel_energy), _num(r.collect_energy), r.f_calls, r.rho_calls,
                    f"{r.ms:.3f}"])
    return buf.getvalue()


def write_csv(path, records):
    Path(path).write_text(csv_text(records))


def _cells(records, attr="value"):
    out = {}
    for r in records:
        if not r.error:
            out.setdefault(r.algo, {}).setdefault(r.budget, []).append(getattr(r, attr))
    return out


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_value_vs_budget(records, path, ylabel="objective value"):
    cells = _cells(records)
    fig, ax = plt.subplots(figsize=(6, 4))
    for algo in sorted(cells):
        budgets = sorted(cells[algo])
        vals = [np.asarray(cells[algo][b]) for b in budgets]
        mean = np.array([v.mean() for v in vals])
        color, marker = ALGO_STYLE.get(algo, ("black", "x"))
        ax.plot(budgets, mean, marker=marker, color=color, label=algo)
        if algo == "rand":
            std = np.array([v.std() for v in vals])
            ax.fill_between(budgets, mean - std, mean + std, color=color, alpha=0.25,
                            label="rand mean ± std")
    ax.set_xlabel("budget")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_energy_split(records, path):
    """Mean travel vs collection energy per (budget, algorithm)."""
    travel, collect = _cells(records, "travel_energy"), _cells(records, "collect_energy")
    algos = sorted(travel)
    budgets = sorted({b for a in algos for b in travel[a]})
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(algos), 1)
    x = np.arange(len(budgets))
    for j, algo in enumerate(algos):
        t = np.array([np.mean(travel[algo].get(b, [0.0])) for b in budgets])
        c = np.array([np.mean(collect[algo].get(b, [0.0])) for b in budgets])
        color = ALGO_STYLE.get(algo, ("black", "x"))[0]
        pos = x + (j - (len(algos) - 1) / 2) * width
        ax.bar(pos, t, width, color=color, label=f"{algo} travel")
        ax.bar(pos, c, width, bottom=t, color=color, alpha=0.45, hatch="//",
               label=f"{algo} collection")
    ax.set_xticks(x, [f"{b:g}" for b in budgets])
    ax.set_xlabel("budget")
    ax.set_ylabel("energy")
    ax.legend(fontsize="small", ncol=2)
    fig.tight_layout()
    _save(fig, path)


def plot_selection(points, selections, path):
    """PoI map with each algorithm's selected set; ``selections`` maps algo -> items."""
    fig, ax = plt.subplots(figsize=(5, 5.5))
    ax.scatter(points.coords[:, 0], points.coords[:, 1], s=14, color="lightgray", label="PoI")
    ax.scatter([points.depot[0]], [points.depot[1]], marker="*", s=120, color="black",
               label="depot")
    for algo in sorted(selections):
        items = list(selections[algo])
        if not items:
            continue
        color, marker = ALGO_STYLE.get(algo, ("black", "x"))
        xy = points.coords[items]
        ax.scatter(xy[:, 0], xy[:, 1], marker=marker, facecolors="none", edgecolors=color,
                   s=60, label=algo)
    ax.set_aspect("equal")
    ax.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def emit_report(records, out_dir, scenario=None, points=None, selection_budget=None,
                selection_seed=None):
    """Write records.csv and the SVG figures under ``out_dir``; returns the paths."""
    if not records:
        raise ValueError("no records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "records.csv", out / "value_vs_budget.svg", out / "energy_split.svg"]
    write_csv(paths[0], records)
    plot_value_vs_budget(records, paths[1],
                         "mutual information" if scenario == "poi" else "objective value")
    plot_energy_split(records, paths[2])
    if scenario == "poi" and points is not None:
        ok = [r for r in records if not r.error]
        seed = ok[0].seed if selection_seed is None else selection_seed
        budget = selection_budget
        if budget is None:
            budget = sorted({r.budget for r in ok})[0]
        sel = {r.algo: r.items for r in ok if r.seed == seed and r.budget == budget}
        paths.append(out / "selection.svg")
        plot_selection(points, sel, paths[-1])
    return paths
