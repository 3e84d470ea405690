import numpy as np
import pytest

from labyrinths.geometry import FlatBall, point_flatball_distance
from labyrinths.shells import Labyrinth, build_labyrinth, empty_labyrinth, make_schedule
from labyrinths.verifier import (
    EffortBudget,
    EscapePath,
    audit_labyrinth,
    build_roadmap,
    min_escape_length,
    path_length,
    shortcut,
    shortest_escape,
    verify_path,
)

from oracles import grid_shortest_path

ANNULUS = {"kind": "annulus", "inner": 0.5, "outer": 1.0}
SPHERE_IN = {"kind": "sphere", "radius": 0.5}
SPHERE_OUT = {"kind": "sphere", "radius": 1.0}

SINGLE = FlatBall(center=np.array([0.5, 0.0]), normal=np.array([1.0, 0.0]),
                  radius=0.2)
SINGLE_LAB = Labyrinth(dim=2, domain={"kind": "box", "lo": [-0.2, -0.6],
                                      "hi": [1.2, 0.6]},
                       components=[SINGLE])
QUICK = EffortBudget(seeds=(0, 1), node_budgets=(8000,), shortcut_rounds=200)


def test_empty_annulus_radial_baseline():
    lab = empty_labyrinth(2, ANNULUS)
    rep = min_escape_length(lab, SPHERE_IN, SPHERE_OUT, QUICK)
    assert rep["best_length"] == pytest.approx(0.5, rel=0.02)
    assert rep["upper_bound"] is True


def test_single_obstacle_matches_reflection_value():
    rep = min_escape_length(SINGLE_LAB, {"kind": "point", "coords": [0.0, 0.0]},
                            {"kind": "point", "coords": [1.0, 0.0]}, QUICK)
    expect = 2.0 * np.hypot(0.5, 0.2)  # tip reflection: 1.07703...
    assert rep["best_length"] == pytest.approx(expect, rel=0.02)


def test_single_obstacle_matches_grid_oracle():
    oracle = grid_shortest_path(
        [(np.array([0.5, -0.2]), np.array([0.5, 0.2]))],
        (0.0, 0.0), (1.0, 0.0), step=1.0 / 256,
        lo=(-0.05, -0.35), hi=(1.05, 0.35))
    rep = min_escape_length(SINGLE_LAB, {"kind": "point", "coords": [0.0, 0.0]},
                            {"kind": "point", "coords": [1.0, 0.0]}, QUICK)
    assert rep["best_length"] == pytest.approx(oracle, rel=0.02)


def test_roadmap_rejection_law():
    clearance = 0.05
    rm = build_roadmap(SINGLE_LAB.domain, SINGLE_LAB, 2000,
                       clearance=clearance, seed=0)
    dists = np.array([point_flatball_distance(p, SINGLE) for p in rm.nodes])
    assert dists.min() > clearance


def test_roadmap_rim_nodes_near_tips():
    rm = build_roadmap(SINGLE_LAB.domain, SINGLE_LAB, 2000, 0.0, seed=0)
    for tip in (np.array([0.5, 0.2]), np.array([0.5, -0.2])):
        near = np.linalg.norm(rm.nodes - tip, axis=1)
        assert np.sum(near < 3e-3) >= 4


def test_roadmap_edges_avoid_components():
    rm = build_roadmap(SINGLE_LAB.domain, SINGLE_LAB, 1500, 0.0, seed=1)
    g = rm.graph.tocoo()
    rng = np.random.default_rng(0)
    take = rng.choice(len(g.row), size=min(300, len(g.row)), replace=False)
    from labyrinths.geometry import segment_flatball_intersect

    for idx in take:
        a, b = rm.nodes[g.row[idx]], rm.nodes[g.col[idx]]
        assert not segment_flatball_intersect((a, b), SINGLE, 0.0)


def test_roadmap_budget_validation():
    with pytest.raises(ValueError):
        build_roadmap(ANNULUS, empty_labyrinth(2, ANNULUS), 50, 0.0, 0)


def test_escape_path_bookkeeping():
    poly = np.array([[0.0, 0.0], [0.3, 0.4], [1.0, 0.4]])
    p = EscapePath(polyline=poly, length=path_length(poly), clearance=0.0)
    assert p.length == pytest.approx(0.5 + 0.7, abs=1e-12)
    with pytest.raises(ValueError):
        EscapePath(polyline=poly, length=p.length + 1e-6, clearance=0.0)
    with pytest.raises(ValueError):
        EscapePath(polyline=np.array([[0.0, 0.0], [0.0, 0.0]]), length=0.0,
                   clearance=0.0)


def test_path_endpoints_lie_on_sets():
    lab = empty_labyrinth(2, ANNULUS)
    rm = build_roadmap(ANNULUS, lab, 3000, 0.0, seed=2)
    path = shortest_escape(rm, SPHERE_IN, SPHERE_OUT)
    assert path is not None
    assert abs(np.linalg.norm(path.polyline[0]) - 0.5) < 1e-9
    assert abs(np.linalg.norm(path.polyline[-1]) - 1.0) < 1e-9
    assert verify_path(path, lab, SPHERE_IN, SPHERE_OUT)


def test_shortcut_straight_path_unchanged():
    poly = np.array([[0.0, 0.0], [1.0, 0.0]])
    p = EscapePath(polyline=poly, length=1.0, clearance=0.0)
    q = shortcut(p, empty_labyrinth(2, {"kind": "box", "lo": [-1, -1],
                                        "hi": [2, 1]}), rounds=50, seed=0)
    assert q.length == pytest.approx(1.0, abs=1e-12)


def test_shortcut_collapses_zigzag():
    xs = np.linspace(0.0, 1.0, 21)
    poly = np.column_stack([xs, 0.05 * (-1.0) ** np.arange(21)])
    p = EscapePath(polyline=poly, length=path_length(poly), clearance=0.0)
    lab = empty_labyrinth(2, {"kind": "box", "lo": [-1, -1], "hi": [2, 1]})
    q = shortcut(p, lab, rounds=300, seed=1)
    straight = np.linalg.norm(poly[-1] - poly[0])
    assert q.length <= p.length
    assert q.length <= straight * 1.01


def test_more_shells_never_shorten_within_tolerance():
    src = {"kind": "sphere", "radius": 0.5}
    tgt = {"kind": "sphere", "radius": 0.75}
    effort = EffortBudget(seeds=(0, 1), node_budgets=(10_000,),
                          shortcut_rounds=200)
    lens = []
    for J in (1, 2):
        lab = build_labyrinth(make_schedule(2.0 / 3.0, J, 4), dim=2, seed=0,
                              domain={"kind": "annulus", "inner": 0.5,
                                      "outer": 0.75}, scale=0.75)
        rep = min_escape_length(lab, src, tgt, effort)
        lens.append(rep["best_length"])
    assert lens[1] >= lens[0] * 0.98  # 2% search-resolution slack


def test_audit_passes_on_default_build():
    lab = build_labyrinth(make_schedule(0.5, 2, 4), dim=2, seed=0)
    rep = audit_labyrinth(lab)
    assert rep["passed"]
    names = {c["name"] for c in rep["checks"]}
    assert {"tangency", "next-sublevel-clearance", "pairwise-disjoint",
            "containment", "lex-hyperplane-witnesses"} <= names


def test_audit_flags_inflated_component():
    lab = build_labyrinth(make_schedule(0.5, 2, 4), dim=2, seed=0)
    bad = lab.components[3]
    lab.components[3] = FlatBall(center=bad.center, normal=bad.normal,
                                 radius=bad.radius * 10.0, level=bad.level)
    rep = audit_labyrinth(lab)
    assert not rep["passed"]
    clearance = next(c for c in rep["checks"]
                     if c["name"] == "next-sublevel-clearance")
    assert not clearance["passed"]
    assert clearance["worst_component"] == lab.components[3].level


def test_audit_empty_labyrinth():
    rep = audit_labyrinth(empty_labyrinth(2))
    assert rep["passed"] and rep["empty"]


def test_reports_are_deterministic():
    lab = build_labyrinth(make_schedule(0.5, 1, 3), dim=2, seed=0,
                          domain={"kind": "ball"})
    effort = EffortBudget(seeds=(0,), node_budgets=(4000,), shortcut_rounds=100)
    src = {"kind": "sphere", "radius": 0.5}
    tgt = {"kind": "sphere", "radius": 1.0}
    r1 = min_escape_length(lab, src, tgt, effort)
    r2 = min_escape_length(lab, src, tgt, effort)
    assert r1["best_length"] == r2["best_length"]
    assert np.array_equal(r1["best_path"].polyline, r2["best_path"].polyline)


def test_d3_radial_baseline():
    lab = empty_labyrinth(3, ANNULUS)
    effort = EffortBudget(seeds=(0,), node_budgets=(9000,), shortcut_rounds=150)
    rep = min_escape_length(lab, SPHERE_IN, SPHERE_OUT, effort)
    assert rep["best_length"] == pytest.approx(0.5, rel=0.05)


def test_three_obstacle_grid_oracle_agreement():
    segs = [
        (np.array([0.3, -0.30]), np.array([0.3, 0.10])),
        (np.array([0.6, -0.10]), np.array([0.6, 0.35])),
        (np.array([0.85, -0.25]), np.array([0.85, 0.05])),
    ]
    comps = []
    for a, b in segs:
        mid = 0.5 * (a + b)
        r = 0.5 * np.linalg.norm(b - a)
        comps.append(FlatBall(center=mid, normal=np.array([1.0, 0.0]),
                              radius=r))
    lab = Labyrinth(dim=2, domain={"kind": "box", "lo": [-0.15, -0.6],
                                   "hi": [1.15, 0.6]}, components=comps)
    rep = min_escape_length(lab, {"kind": "point", "coords": [0.0, 0.0]},
                            {"kind": "point", "coords": [1.0, 0.0]}, QUICK)
    oracle = grid_shortest_path(segs, (0.0, 0.0), (1.0, 0.0), step=1.0 / 256,
                                lo=(-0.1, -0.55), hi=(1.1, 0.55))
    assert rep["best_length"] == pytest.approx(oracle, rel=0.02)


def test_resolution_monotonicity_within_tolerance():
    # bigger node budgets never worsen the found length beyond the 2%
    # search-resolution tolerance (min over seeds at each budget)
    best = {}
    for budget in (4000, 16_000):
        lens = []
        for seed in (0, 1, 2):
            effort = EffortBudget(seeds=(seed,), node_budgets=(budget,),
                                  shortcut_rounds=200)
            rep = min_escape_length(
                SINGLE_LAB, {"kind": "point", "coords": [0.0, 0.0]},
                {"kind": "point", "coords": [1.0, 0.0]}, effort)
            lens.append(rep["best_length"])
        best[budget] = min(x for x in lens if x is not None)
    assert best[16_000] <= best[4000] * 1.02
