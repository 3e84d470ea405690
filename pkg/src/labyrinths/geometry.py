"""Flat-disc primitives: distances, intersection predicates, LP separation.

A *flat ball* is a closed (d-1)-dimensional disc sitting in an affine
hyperplane of R^d: {center + v : v . normal = 0, |v| <= radius}.  In d = 2
it degenerates to a segment.  All functions here are pure; tolerances come
from :mod:`labyrinths.config`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .config import TOL

INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def unit_vector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalise the zero vector")
    return v / n


def tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to `normal`.

    Returns a (d, d-1) matrix whose columns span normal^perp, built from a
    single Householder reflection (no branch on near-parallel cases).
    """
    n = unit_vector(normal)
    d = n.shape[0]
    alpha = 1.0 if n[0] >= 0.0 else -1.0
    u = n.copy()
    u[0] += alpha
    H = np.eye(d) - 2.0 * np.outer(u, u) / (u @ u)
    return H[:, 1:]


@dataclass(eq=False)
class Hyperplane:
    """Oriented hyperplane {x : normal . x = offset} with |normal| = 1."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(self.normal) - 1.0) > TOL.unit_norm:
            raise ValueError("hyperplane normal must have unit norm")
        self.offset = float(self.offset)

    def side(self, x: np.ndarray) -> float:
        return float(np.dot(self.normal, x) - self.offset)


@dataclass(eq=False)
class FlatBall:
    """Closed (d-1)-disc in the hyperplane through `center` orthogonal to `normal`.

    `level` optionally tags the construction position (shell, sublevel,
    point index).  `transform`, when present, is a (d, d+1) affine matrix
    [A | b]; the actual set is then {A x + b : x in the stored disc}.
    """

    center: np.ndarray
    normal: np.ndarray
    radius: float
    level: tuple[int, int, int] | None = None
    transform: np.ndarray | None = None

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.normal = np.asarray(self.normal, dtype=float)
        self.radius = float(self.radius)
        if self.radius <= 0.0:
            raise ValueError("flat ball radius must be positive")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("flat ball center must be finite")
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-9:
            raise ValueError("flat ball normal must have unit norm")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if np.array_equal(self.a, self.b):
            raise ValueError("segment endpoints must differ")


def point_flatball_distance(x: np.ndarray, fb: FlatBall) -> float:
    """Euclidean distance from `x` to the closed flat ball (0 iff inside)."""
    v = np.asarray(x, dtype=float) - fb.center
    h = float(v @ fb.normal)
    w = v - h * fb.normal
    rho = float(np.linalg.norm(w))
    if rho <= fb.radius:
        return abs(h)
    return float(np.hypot(h, rho - fb.radius))


def points_flatball_distance(xs: np.ndarray, fb: FlatBall) -> np.ndarray:
    """Vectorised :func:`point_flatball_distance` over rows of `xs`."""
    v = np.asarray(xs, dtype=float) - fb.center
    h = v @ fb.normal
    w = v - np.outer(h, fb.normal)
    rho = np.linalg.norm(w, axis=1)
    excess = np.maximum(rho - fb.radius, 0.0)
    return np.hypot(h, excess)


def project_to_flatball(x: np.ndarray, fb: FlatBall) -> np.ndarray:
    """Closest point of the flat ball to `x`."""
    v = np.asarray(x, dtype=float) - fb.center
    h = float(v @ fb.normal)
    w = v - h * fb.normal
    rho = float(np.linalg.norm(w))
    if rho > fb.radius:
        w *= fb.radius / rho
    return fb.center + w


def segment_flatball_distance(a, b, fb: FlatBall, tol: float | None = None) -> float:
    """Distance between the segment [a, b] and the flat ball.

    Piercing/touching of the disc plane inside the disc is detected exactly
    (returns 0.0); otherwise the distance of the point p(t) = a + t(b-a) to
    the disc is convex in t and is minimised by golden-section search on
    [0, 1] down to `tol`.
    """
    if tol is None:
        tol = TOL.geometric
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ha = float((a - fb.center) @ fb.normal)
    hb = float((b - fb.center) @ fb.normal)
    if ha == 0.0 and hb == 0.0:
        # Coplanar segment: distance to the disc reduces to an in-plane
        # point-segment distance against the disc centre.
        return max(_point_segment_distance(fb.center, a, b) - fb.radius, 0.0)
    if ha * hb <= 0.0:
        t = ha / (ha - hb)
        q = a + t * (b - a)
        w = q - fb.center
        w = w - float(w @ fb.normal) * fb.normal
        if np.linalg.norm(w) <= fb.radius:
            return 0.0

    def g(t: float) -> float:
        return point_flatball_distance(a + t * (b - a), fb)

    lo, hi = 0.0, 1.0
    x1 = hi - INV_GOLDEN * (hi - lo)
    x2 = lo + INV_GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > tol:
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - INV_GOLDEN * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + INV_GOLDEN * (hi - lo)
            g2 = g(x2)
    return min(g(0.0), g(1.0), g1, g2, g(0.5 * (lo + hi)))


def segment_flatball_intersect(seg, fb: FlatBall, clearance: float = 0.0) -> bool:
    """True iff the segment comes within `clearance` of the flat ball."""
    if clearance < 0.0:
        raise ValueError("clearance must be nonnegative")
    if isinstance(seg, Segment):
        a, b = seg.a, seg.b
    else:
        a, b = seg
    return segment_flatball_distance(a, b, fb) <= clearance


def _point_segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(x - a))
    t = float(np.clip((x - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * ab)))


def flatball_pair_distance(f1: FlatBall, f2: FlatBall, tol: float = 1e-9,
                           max_iter: int = 2000) -> float:
    """Distance between two flat balls via alternating projections.

    Both sets are convex, so projecting back and forth converges to a pair
    of closest points; iteration stops when successive moves fall below
    `tol`.  Exact for disjoint pairs up to that tolerance; returns 0.0 when
    the alternation collapses onto a common point.
    """
    x = f1.center.copy()
    prev = np.inf
    for _ in range(max_iter):
        y = project_to_flatball(x, f2)
        x2 = project_to_flatball(y, f1)
        dist = float(np.linalg.norm(x2 - y))
        if prev - dist < tol:
            return dist
        prev = dist
        x = x2
    return prev


def separating_hyperplane(first, second, margin: float = 0.0,
                          floor: float | None = None) -> Hyperplane | None:
    """Hyperplane with first on the high side and second on the low side.

    Solves the max-margin feasibility LP (with an L1 cap on the normal so
    the problem stays bounded), rescales the witness to unit norm, and
    re-checks the inequalities `w.x >= b + margin` / `w.x <= b - margin`
    against every input point.  Returns None when no witness achieving
    max(margin, floor) was found; that is not a proof of inseparability.
    """
    first = np.atleast_2d(np.asarray(first, dtype=float))
    second = np.atleast_2d(np.asarray(second, dtype=float))
    if first.size == 0 or second.size == 0:
        raise ValueError("both point sets must be nonempty")
    if floor is None:
        floor = TOL.lp_margin_floor
    d = first.shape[1]
    n1, n2 = len(first), len(second)
    # variables: u (d), v (d), b, gamma with w = u - v, u, v >= 0
    nv = 2 * d + 2
    cost = np.zeros(nv)
    cost[-1] = -1.0  # maximise gamma
    rows = []
    rhs = []
    for x in first:  # -w.x + b + gamma <= 0
        rows.append(np.concatenate([-x, x, [1.0, 1.0]]))
        rhs.append(0.0)
    for x in second:  # w.x - b + gamma <= 0
        rows.append(np.concatenate([x, -x, [-1.0, 1.0]]))
        rhs.append(0.0)
    l1 = np.concatenate([np.ones(2 * d), [0.0, 0.0]])
    rows.append(l1)
    rhs.append(1.0)
    bounds = [(0.0, None)] * (2 * d) + [(None, None), (None, None)]
    res = linprog(cost, A_ub=np.asarray(rows), b_ub=np.asarray(rhs),
                  bounds=bounds, method="highs")
    if not res.success or res.x is None:
        return None
    u, v = res.x[:d], res.x[d:2 * d]
    w = u - v
    nw = float(np.linalg.norm(w))
    if nw < 1e-14:
        return None
    w = w / nw
    lo = float(np.min(first @ w))
    hi = float(np.max(second @ w))
    b = 0.5 * (lo + hi)
    achieved = 0.5 * (lo - hi)
    required = max(margin, floor)
    if achieved < required:
        return None
    if np.min(first @ w) < b + margin or np.max(second @ w) > b - margin:
        return None
    _ = n1, n2
    return Hyperplane(w, b)


def flatball_rim_points(fb: FlatBall, count: int) -> np.ndarray:
    """`count` spread points on the rim sphere of the flat ball.

    d = 2: the two segment endpoints (count is ignored beyond 2).
    d = 3: equally spaced rim angles.
    d >= 4: farthest-point selection from a quasi-uniform candidate set of
    the rim (d-2)-sphere, giving an empirical covering of the rim at
    resolution comparable to count^(-1/(d-2)).
    """
    B = tangent_basis(fb.normal)
    d = fb.dim
    if d == 2:
        u = B[:, 0]
        return np.vstack([fb.center - fb.radius * u, fb.center + fb.radius * u])
    if d == 3:
        ang = 2.0 * np.pi * np.arange(count) / count
        circ = np.outer(np.cos(ang), B[:, 0]) + np.outer(np.sin(ang), B[:, 1])
        return fb.center + fb.radius * circ
    from .sampling import farthest_point_order, sphere_candidates

    cand = sphere_candidates(d - 1, max(64, 8 * count))
    idx = farthest_point_order(cand, start=0, stop_count=count)
    return fb.center + fb.radius * (cand[idx] @ B.T)


def flatball_extremal_points(fb: FlatBall, count: int) -> np.ndarray:
    """Rim points plus the centre, the LP sampling of a flat ball.

    Requires count >= 2 in d = 2 (the rim is just the two endpoints) and
    count >= 2d otherwise.
    """
    d = fb.dim
    min_count = 2 if d == 2 else 2 * d
    if count < min_count:
        raise ValueError(f"count must be at least {min_count} in dimension {d}")
    rim = flatball_rim_points(fb, count)
    return np.vstack([rim, fb.center])
