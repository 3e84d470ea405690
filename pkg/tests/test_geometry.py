import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labyrinths.geometry import (
    FlatBall,
    Segment,
    flatball_extremal_points,
    flatball_pair_distance,
    flatball_rim_points,
    point_flatball_distance,
    points_flatball_distance,
    segment_flatball_distance,
    segment_flatball_intersect,
    separating_hyperplane,
    tangent_basis,
)

from oracles import brute_segment_disc_distance

DISC = FlatBall(center=np.array([0.5, 0.0]), normal=np.array([1.0, 0.0]),
                radius=0.2)


def test_segment_through_disc_center_intersects():
    seg = (DISC.center - DISC.normal, DISC.center + DISC.normal)
    assert segment_flatball_intersect(seg, DISC, 0.0)


def test_axis_segment_crosses_disc():
    assert segment_flatball_intersect(
        (np.array([0.0, 0.0]), np.array([1.0, 0.0])), DISC, 0.0)


def test_offset_segment_distance_matches_brute_force():
    a, b = np.array([0.0, 0.3]), np.array([1.0, 0.3])
    brute = brute_segment_disc_distance(a, b, DISC.center, DISC.normal,
                                        DISC.radius, grid=20001)
    assert brute == pytest.approx(0.1, abs=1e-6)
    assert segment_flatball_distance(a, b, DISC) == pytest.approx(0.1, abs=1e-9)
    assert not segment_flatball_intersect((a, b), DISC, 0.0)
    assert segment_flatball_intersect((a, b), DISC, 0.15)


def test_point_distances():
    assert point_flatball_distance(DISC.center, DISC) == 0.0
    assert point_flatball_distance(DISC.center + DISC.normal, DISC) == pytest.approx(1.0)
    assert point_flatball_distance(np.array([0.5, 0.5]), DISC) == pytest.approx(0.3)


def test_segment_requires_distinct_endpoints():
    with pytest.raises(ValueError):
        Segment(np.zeros(2), np.zeros(2))


def test_separating_hyperplane_axis_separated():
    first = np.array([[0.0, y] for y in np.linspace(-1, 1, 9)])
    second = np.array([[5.0, y] for y in np.linspace(-1, 1, 9)])
    h = separating_hyperplane(first, second, margin=1.0)
    assert h is not None
    assert abs(abs(h.normal[0]) - 1.0) < 1e-9
    assert abs(abs(h.offset) - 2.5) < 1e-9
    assert np.min(first @ h.normal) >= h.offset + 1.0
    assert np.max(second @ h.normal) <= h.offset - 1.0


def test_separating_hyperplane_identical_sets_fails():
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert separating_hyperplane(pts, pts, margin=0.0) is None


def test_separating_hyperplane_empty_input():
    with pytest.raises(ValueError):
        separating_hyperplane(np.empty((0, 2)), np.array([[1.0, 0.0]]), 0.0)


def test_separating_hyperplane_tangent_discs_on_circle():
    # two discs tangent to the unit circle at well separated points
    angles = [0.3, 1.4]
    discs = []
    for a in angles:
        n = np.array([np.cos(a), np.sin(a)])
        discs.append(FlatBall(center=0.8 * n, normal=n, radius=0.1))
    s1 = flatball_extremal_points(discs[0], 2)
    s2 = flatball_extremal_points(discs[1], 2)
    h = separating_hyperplane(s1, s2, margin=1e-6)
    assert h is not None
    # re-check on a 10x denser sampling of both discs
    for disc, sign in ((discs[0], 1.0), (discs[1], -1.0)):
        u = np.array([-disc.normal[1], disc.normal[0]])
        ts = np.linspace(-1, 1, 21)
        dense = disc.center + np.outer(ts, disc.radius * u)
        vals = sign * (dense @ h.normal - h.offset)
        assert np.all(vals >= 1e-6)


def test_extremal_points_d2():
    pts = flatball_extremal_points(DISC, 2)
    assert pts.shape == (3, 2)
    expect = {(0.5, -0.2), (0.5, 0.2), (0.5, 0.0)}
    got = {tuple(np.round(p, 12)) for p in pts}
    assert got == expect


def test_extremal_points_d3_gap():
    fb = FlatBall(center=np.zeros(3), normal=np.array([0.0, 0.0, 1.0]),
                  radius=1.0)
    rim = flatball_rim_points(fb, 8)
    assert rim.shape == (8, 3)
    ang = np.sort(np.arctan2(rim[:, 1], rim[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    assert gaps.max() <= np.pi / 2 + 1e-9


def test_extremal_points_on_the_set():
    for d in (2, 3, 4):
        rng = np.random.default_rng(d)
        n = rng.normal(size=d)
        fb = FlatBall(center=rng.normal(size=d), normal=n / np.linalg.norm(n),
                      radius=0.7)
        pts = flatball_extremal_points(fb, max(2, 2 * d))
        dists = points_flatball_distance(pts, fb)
        assert np.max(dists) <= 1e-12


def test_extremal_points_count_validation():
    fb = FlatBall(center=np.zeros(3), normal=np.array([0.0, 0.0, 1.0]),
                  radius=1.0)
    with pytest.raises(ValueError):
        flatball_extremal_points(fb, 3)


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    n = rng.normal(size=d)
    fb = FlatBall(center=rng.uniform(-1, 1, size=d),
                  normal=n / np.linalg.norm(n),
                  radius=float(rng.uniform(0.1, 0.8)))
    a = rng.uniform(-1.5, 1.5, size=d)
    b = rng.uniform(-1.5, 1.5, size=d)
    return fb, a, b


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_intersect_predicate_agrees_with_grid_oracle(seed):
    """Equivalence with the 200-point grid oracle, away from the grey zone.

    A piercing segment has grid minimum at most L/398 (the distance along
    the segment is L-Lipschitz in the parameter); instances whose true
    distance falls inside (0, 2 L/398] are skipped since both sides are
    then resolution-limited.
    """
    from hypothesis import assume

    fb, a, b = _random_instance(seed)
    if np.array_equal(a, b):
        return
    seg_len = float(np.linalg.norm(b - a))
    thresh = seg_len / 398.0 + 1e-9
    grid_min = brute_segment_disc_distance(a, b, fb.center, fb.normal,
                                           fb.radius, grid=200)
    pred = segment_flatball_intersect((a, b), fb, 0.0)
    assume(pred or grid_min > 2.0 * thresh)
    assert pred == (grid_min <= thresh)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_point_distance_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    n = rng.normal(size=d)
    fb = FlatBall(center=rng.uniform(-1, 1, size=d),
                  normal=n / np.linalg.norm(n),
                  radius=float(rng.uniform(0.1, 1.0)))
    x = rng.uniform(-2, 2, size=d)
    Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    fb_rot = FlatBall(center=Q @ fb.center,
                      normal=(Q @ fb.normal) / np.linalg.norm(Q @ fb.normal),
                      radius=fb.radius)
    d0 = point_flatball_distance(x, fb)
    d1 = point_flatball_distance(Q @ x, fb_rot)
    assert d0 == pytest.approx(d1, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_separating_hyperplane_recheck_property(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    gap = rng.uniform(0.2, 2.0)
    first = rng.uniform(-1, 1, size=(6, d))
    second = rng.uniform(-1, 1, size=(6, d))
    shift = np.zeros(d)
    shift[0] = 2.0 + gap
    first = first + shift
    h = separating_hyperplane(first, second, margin=gap / 4)
    assert h is not None
    assert np.min(first @ h.normal) >= h.offset + gap / 4
    assert np.max(second @ h.normal) <= h.offset - gap / 4


def test_pair_distance_matches_dense_sampling():
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = int(rng.integers(2, 4))
        inst = []
        for _ in range(2):
            n = rng.normal(size=d)
            inst.append(FlatBall(center=rng.uniform(-1, 1, size=d),
                                 normal=n / np.linalg.norm(n),
                                 radius=float(rng.uniform(0.1, 0.6))))
        f1, f2 = inst
        got = flatball_pair_distance(f1, f2)
        B = tangent_basis(f2.normal)
        if d == 2:
            ts = np.linspace(-1, 1, 2001)
            pts = f2.center + np.outer(ts, f2.radius * B[:, 0])
        else:
            ts = np.linspace(-1, 1, 61)
            grid = np.stack(np.meshgrid(ts, ts), axis=-1).reshape(-1, 2)
            grid = grid[np.linalg.norm(grid, axis=1) <= 1.0]
            pts = f2.center + (grid * f2.radius) @ B.T
        brute = min(point_flatball_distance(p, f1) for p in pts)
        # distance from f1 to sampled points of f2 upper-bounds the truth
        assert got <= brute + 1e-6
        if got > 1e-6:
            assert brute >= got * 0.5
