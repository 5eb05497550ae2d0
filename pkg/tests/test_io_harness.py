import csv
import filecmp
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from routesub import io, solve
from routesub.errors import ParameterError
from routesub.harness import (CSV_HEADER, POI_AREA, RunRecord, ScenarioConfig,
                              check_budget_safety, csv_text, emit_report, energy_identity,
                              gen_multicast_instance, gen_poi_instance, load_instance,
                              poi_points, run_experiment, write_instance)
from routesub.routing import PointSet, WeightedGraph


def test_matrix_round_trip(tmp_path):
    a = np.random.default_rng(0).random((4, 4))
    io.write_matrix(tmp_path / "m.txt", a)
    assert np.array_equal(io.read_matrix(tmp_path / "m.txt"), a)


def test_graph_round_trip(tmp_path):
    g = WeightedGraph(4, [(0, 1, 2.5), (1, 2, 1.0), (0, 3, 7.0)])
    io.write_graph(tmp_path / "g.txt", g)
    text = (tmp_path / "g.txt").read_text().splitlines()
    assert text[0] == "4 3" and text[1].startswith("1 2 ")
    h = io.read_graph(tmp_path / "g.txt")
    assert sorted(h.edges()) == sorted(g.edges())


def test_points_round_trip(tmp_path):
    pts = PointSet(np.array([[1.0, 2.0], [3.5, 4.25]]), (0.0, 0.0), 0.6)
    io.write_points(tmp_path / "p.txt", pts, [0.3, 1.7])
    back, visit = io.read_points(tmp_path / "p.txt")
    assert np.array_equal(back.coords, pts.coords)
    assert back.travel_rate == 0.6 and list(visit) == [0.3, 1.7]


def test_bad_matrix_file(tmp_path):
    (tmp_path / "m.txt").write_text("3\n1 2 3\n")
    with pytest.raises(ParameterError):
        io.read_matrix(tmp_path / "m.txt")


@pytest.mark.parametrize("text,seeds", [("1..4", [1, 2, 3, 4]), ("3,5,8", [3, 5, 8]),
                                        ("3", [0, 1, 2])])
def test_parse_seeds(text, seeds):
    assert io.parse_seeds(text) == seeds


def test_poi_constants():
    pts, collect = poi_points(3)
    assert pts.n == 45
    assert np.all((pts.coords >= 0) & (pts.coords <= np.array(POI_AREA)))
    assert np.all((collect > 0) & (collect < 2))
    assert pts.travel_rate == 0.6 and tuple(pts.depot) == (0.0, 0.0)
    inst = gen_poi_instance(3)
    assert inst.budget == 120.0 and inst.n == 45


def test_multicast_constants():
    inst = gen_multicast_instance(20, 5)
    W = inst.cost.graph.weights
    off = W[~np.eye(21, dtype=bool)]
    assert off.min() >= 1 and off.max() <= 200 and np.all(off == np.round(off))
    assert inst.objective.lam == 1.0
    assert inst.cost.kind == "steiner-kmb" and inst.theta == 1.0
    assert np.all(inst.cost.visiting_costs == 0)


def test_generation_is_deterministic(tmp_path):
    for scenario, make in (("poi", lambda: gen_poi_instance(7)),
                           ("multicast", lambda: gen_multicast_instance(12, 7))):
        a = write_instance(tmp_path / f"{scenario}a", make(), scenario, 7)
        b = write_instance(tmp_path / f"{scenario}b", make(), scenario, 7)
        names = [p.name for p in a.parent.iterdir()]
        match, mismatch, errors = filecmp.cmpfiles(a.parent, b.parent, names, shallow=False)
        assert not mismatch and not errors


def test_instance_reload_gives_same_solution(tmp_path):
    inst = gen_multicast_instance(10, 2)
    path = write_instance(tmp_path, inst, "multicast", 2)
    again = load_instance(path)
    assert solve(inst).value == solve(again).value


def test_config_parsing(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("scenario=poi\nbudgets=100,160,240,320\nseeds=1..20\ntheta=1.0\nk=auto\n")
    cfg = ScenarioConfig.from_file(p)
    assert cfg.budgets == [100.0, 160.0, 240.0, 320.0]
    assert cfg.seeds == list(range(1, 21)) and cfg.loop_k is None and cfg.theta == 1.0
    with pytest.raises(ParameterError):
        ScenarioConfig(budgets=[-1.0])
    with pytest.raises(ParameterError):
        ScenarioConfig(seeds=[])


def small_records():
    cfg = ScenarioConfig("multicast", n=8, budgets=[60.0, 120.0], seeds=[1, 2])
    return run_experiment(cfg)


def test_empty_algorithm_list():
    assert run_experiment(ScenarioConfig("multicast", n=6, algorithms=())) == []


def test_run_experiment_shape_and_safety():
    recs = small_records()
    assert len(recs) == 3 * 2 * 2
    assert [r.sort_key for r in recs] == sorted(r.sort_key for r in recs)
    assert check_budget_safety(recs).passed
    assert energy_identity(recs)


def test_budget_safety_flags_violation():
    bad = RunRecord("rand", 0, 10.0, 1.0, 11.0, 0.1, (0,), 11.0, 0.0, 1, 1, 0.0)
    assert not check_budget_safety([bad]).passed


def test_csv_is_deterministic_and_shaped(tmp_path):
    recs = small_records()
    text = csv_text(recs)
    assert text == csv_text(list(reversed(recs)))
    rows = list(csv.reader(text.splitlines()))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == len(recs) + 1


def test_emit_report_writes_svg(tmp_path):
    recs = small_records()
    paths = emit_report(recs, tmp_path / "out", scenario="multicast")
    first = [p.read_bytes() for p in paths]
    for p in paths[1:]:
        assert ET.parse(p).getroot().tag.endswith("svg")
    again = emit_report(recs, tmp_path / "out", scenario="multicast")
    assert [p.read_bytes() for p in again] == first


def test_emit_report_poi_overlay(tmp_path):
    cfg = ScenarioConfig("poi", n=12, budgets=[40.0], seeds=[1])
    recs = run_experiment(cfg)
    paths = emit_report(recs, tmp_path, scenario="poi", points=poi_points(1, 12)[0])
    assert paths[-1].name == "selection.svg"
    ET.parse(paths[-1])
