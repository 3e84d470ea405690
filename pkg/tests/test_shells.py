import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labyrinths.geometry import flatball_pair_distance, flatball_rim_points
from labyrinths.shells import (
    DegenerateScheduleError,
    ExhaustionPlan,
    Labyrinth,
    annulus_labyrinth,
    build_labyrinth,
    build_shell,
    compute_tangent_radius_constant,
    empty_labyrinth,
    make_schedule,
    schedule_from_radii,
    sqrt_gap_partial_sums,
    truncate,
)


def test_schedule_values_j1_m2():
    s = make_schedule(0.5, 1, 2)
    assert s.s[0] == pytest.approx(0.75, abs=1e-15)
    assert s.sublevels[0, 0] == pytest.approx(0.5 + 0.25 / 3, abs=1e-12)
    assert s.sublevels[0, 1] == pytest.approx(0.5 + 0.5 / 3, abs=1e-12)


def test_schedule_rejects_tc_constraint():
    with pytest.raises(ValueError):
        make_schedule(0.5, 2, 2, t=2.0, c=0.3)  # t*c = 0.6
    with pytest.raises(ValueError):
        make_schedule(0.5, 2, 2, t=0.9, c=0.4)  # t must exceed 1
    with pytest.raises(ValueError):
        make_schedule(1.2, 2, 2)


def test_partial_sums_frozen_values():
    s1 = make_schedule(0.5, 1, 2)
    s2 = make_schedule(0.5, 2, 2)
    assert sqrt_gap_partial_sums(s1)[0] == pytest.approx(0.5, abs=1e-12)
    assert sqrt_gap_partial_sums(s2)[1] == pytest.approx(0.78868, abs=1e-5)


def test_tangent_radius_constant_frozen():
    s = make_schedule(0.5, 1, 2)
    # independent evaluation of the defining formula
    lvls = [0.5 + 0.25 / 3, 0.5 + 0.5 / 3, 0.75]
    ratios = [(lvls[i + 1] ** 2 - lvls[i] ** 2) / 0.25 for i in range(2)]
    expect = 0.9 * np.sqrt(min(ratios))
    assert s.a == pytest.approx(expect, abs=1e-12)
    assert s.a == pytest.approx(0.5809, abs=1e-4)


def test_tangent_radius_constant_m1():
    s = make_schedule(0.5, 1, 1)
    lvl = 0.5 + 0.125
    expect = 0.9 * np.sqrt((0.75 ** 2 - lvl ** 2) / 0.25)
    assert s.a == pytest.approx(expect, abs=1e-12)


def test_degenerate_schedule_error():
    with pytest.raises(DegenerateScheduleError):
        compute_tangent_radius_constant(0.5, np.array([0.5]), 2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 0.9), st.integers(1, 6), st.integers(1, 5))
def test_schedule_disc_reach_invariant(s0, J, m):
    sched = make_schedule(s0, J, m)
    for j in range(1, J + 1):
        r_j = sched.tangent_radii[j - 1]
        for k in range(1, m + 1):
            s_jk = sched.sublevels[j - 1, k - 1]
            assert s_jk ** 2 + r_j ** 2 < sched.sublevel_above(j, k) ** 2


def test_build_shell_tangency_and_separation():
    sched = make_schedule(0.5, 2, 4)
    balls, net = build_shell(sched, 1, dim=2, seed=0)
    t = sched.t
    for fb in balls:
        j, k, p = fb.level
        assert j == 1
        s_jk = sched.sublevels[0, k - 1]
        assert fb.center @ fb.normal == pytest.approx(s_jk, abs=1e-12)
        assert np.linalg.norm(fb.center) == pytest.approx(s_jk, abs=1e-12)
    r_1 = sched.tangent_radii[0]
    by_level = {}
    for fb in balls:
        by_level.setdefault(fb.level[1], []).append(fb)
    for k, group in by_level.items():
        s_jk = sched.sublevels[0, k - 1]
        for i in range(len(group)):
            for jdx in range(i):
                gap = np.linalg.norm(group[i].center - group[jdx].center)
                assert gap >= s_jk * 2 * t * r_1 - 1e-12
                assert flatball_pair_distance(group[i], group[jdx]) > 0


def test_build_shell_scaled_covering():
    sched = make_schedule(0.5, 2, 4)
    balls, net = build_shell(sched, 1, dim=2, seed=0)
    # the scaled union inherits the covering property of the unit net
    from labyrinths.nets import covering_radius

    r_1 = float(sched.tangent_radii[0])
    cov_unit = covering_radius(net.points, 2, 50_000, seed=2)
    bound = net.c * 2 * sched.t * r_1 / sched.radius_below(1)
    assert cov_unit <= bound + 4.0 * 50_000 ** (-1.0)


def test_build_labyrinth_desk_run():
    lab = build_labyrinth(make_schedule(0.5, 3, 5), dim=2, seed=0)
    assert 30 <= len(lab) <= 300
    # component count bookkeeping
    total = sum(len(cls) for net in lab.nets for cls in net.classes[:lab.schedule.m])
    assert len(lab) == total
    # lexicographic ordering of level tags
    levels = [fb.level for fb in lab.components]
    assert levels == sorted(levels)


def test_build_labyrinth_empty():
    lab = empty_labyrinth(2)
    assert lab.is_empty
    lab2 = build_labyrinth(None, dim=2)
    assert lab2.is_empty


def test_build_labyrinth_deterministic():
    a = build_labyrinth(make_schedule(0.5, 2, 3), dim=2, seed=4)
    b = build_labyrinth(make_schedule(0.5, 2, 3), dim=2, seed=4)
    assert len(a) == len(b)
    for x, y in zip(a.components, b.components):
        assert np.array_equal(x.center, y.center)
        assert np.array_equal(x.normal, y.normal)
        assert x.radius == y.radius


def test_truncate_identity_and_clearance():
    lab = build_labyrinth(make_schedule(0.5, 3, 4), dim=2, seed=1)
    full, clear0 = truncate(lab, 1, 3)
    assert len(full) == len(lab)
    assert clear0 == pytest.approx(0.5)
    tail, clear = truncate(lab, 2, 3)
    assert clear == pytest.approx(lab.schedule.s[0])
    assert all(np.linalg.norm(fb.center) > clear for fb in tail.components)
    with pytest.raises(ValueError):
        truncate(lab, 0, 2)
    with pytest.raises(ValueError):
        truncate(lab, 3, 2)


def test_truncate_tail_separates_from_inner_ball():
    from labyrinths.geometry import flatball_extremal_points, separating_hyperplane

    lab = build_labyrinth(make_schedule(0.5, 3, 4), dim=2, seed=1)
    tail, clear = truncate(lab, 2, 3)
    theta = 2 * np.pi * np.arange(24) / 24
    ball_samples = 0.5 * np.column_stack([np.cos(theta), np.sin(theta)])
    ball_samples = np.vstack([ball_samples, np.zeros(2)])
    for fb in tail.components[:10]:
        h = separating_hyperplane(flatball_extremal_points(fb, 2),
                                  ball_samples, margin=1e-6)
        assert h is not None


def test_truncate_near_boundary_containment():
    lab = build_labyrinth(make_schedule(0.5, 4, 3), dim=2, seed=0)
    tail, clear = truncate(lab, 4, 4)
    eps = 1.0 - lab.schedule.s[2]
    for fb in tail.components:
        rim = flatball_rim_points(fb, 2)
        assert np.linalg.norm(rim, axis=1).min() >= 1.0 - eps - 1e-12


def test_divergence_lower_bound_pure_arithmetic():
    for s0 in (0.3, 0.5, 0.8):
        j = np.arange(1, 10 ** 4 + 1)
        gaps = (1.0 - s0) / (j * (j + 1))
        sums = np.cumsum(np.sqrt(gaps))
        target = 0.4 * np.sqrt(1.0 - s0) * np.log(j + 1.0)
        assert np.all(sums > target)


def test_exhaustion_plan_validation():
    with pytest.raises(ValueError):
        ExhaustionPlan(rho=np.array([0.5, 0.4]), budgets=np.array([1.0]))
    with pytest.raises(ValueError):
        ExhaustionPlan(rho=np.array([0.5, 0.8]), budgets=np.array([1.0, 2.0]))
    plan = ExhaustionPlan(rho=np.array([0.5, 0.75]), budgets=np.array([0.0]))
    assert plan.rho[1] == 0.75


def test_exhaustion_zero_budget_single_shell():
    from labyrinths.shells import exhaustion_labyrinth

    plan = ExhaustionPlan(rho=np.array([0.5, 0.75]), budgets=np.array([0.0]))
    out = exhaustion_labyrinth(plan, dim=2, seed=0)
    assert len(out) == 1
    assert out[0]["shells"] == 1
    assert out[0]["report"]["best_length"] is not None
    assert out[0]["report"]["best_length"] > 0.0
    lab = out[0]["labyrinth"]
    norms = np.array([np.linalg.norm(fb.center) for fb in lab.components])
    assert np.all(norms > 0.5) and np.all(norms < 0.75)


def test_annulus_labyrinth_containment():
    lab = annulus_labyrinth(0.6, 0.9, 3, 2, dim=2, seed=0)
    for fb in lab.components:
        rim = flatball_rim_points(fb, 2)
        r = np.linalg.norm(np.vstack([rim, fb.center[None]]), axis=1)
        assert np.all(r > 0.6) and np.all(r < 0.9)


def test_d3_shell_audit_with_witnesses():
    from labyrinths.verifier import audit_labyrinth

    lab = build_labyrinth(make_schedule(0.55, 1, 2), dim=3, seed=0)
    rep = audit_labyrinth(lab)
    assert rep["passed"]
    lex = next(c for c in rep["checks"]
               if c["name"] == "lex-hyperplane-witnesses")
    assert lex["passed"] and lex["worst_margin"] >= 1e-6


def test_exhaustion_nontrivial_budget_forces_extra_shells():
    # a budget above the radial width forces genuinely non-radial escapes,
    # which a single shell cannot deliver
    from labyrinths.shells import exhaustion_labyrinth
    from labyrinths.verifier import EffortBudget

    plan = ExhaustionPlan(rho=np.array([0.5, 0.75]), budgets=np.array([0.4]))
    light = EffortBudget(seeds=(0, 1), node_budgets=(20_000,),
                         shortcut_rounds=200)
    out = exhaustion_labyrinth(plan, dim=2, seed=0, effort=light,
                               search_effort=EffortBudget(
                                   seeds=(0,), node_budgets=(16_000,),
                                   shortcut_rounds=150))
    assert out[0]["shells"] >= 2
    assert out[0]["report"]["best_length"] > 0.4
