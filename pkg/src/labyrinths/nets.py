"""Separated point families on the unit sphere.

A maximal delta-separated net is built by a farthest-point sweep over a
dense deterministic candidate set; greedy colouring of its proximity graph
at threshold r then splits it into classes that are each r-separated while
the union keeps covering radius <= delta = c*r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULT_C
from .sampling import farthest_point_order, sphere_candidates, sphere_samples

COVER_SAMPLES = 100_000
CANDIDATE_CAP = 3_000_000

# Scale ladder over which the class count of the colouring is calibrated:
# the ceiling is the max greedy count over these separations, and nets at
# any scale are padded (by class splitting) up to it, so the reported class
# count depends only on (dim, c, seed policy), not on r, across the desk
# range.  Extreme scales whose colouring needs more classes report that
# larger count instead.
CALIBRATION_LADDER = (0.1, 0.2, 0.4)


class NetBudgetError(RuntimeError):
    """Candidate budget exceeded: the dimension is too large for delta."""


def sampling_slack(d: int, samples: int) -> float:
    """Documented resolution bound of a `samples`-point covering estimate."""
    return 4.0 * samples ** (-1.0 / (d - 1))


@dataclass(eq=False)
class SeparatedNet:
    """Classes F_1..F_m on S^(dim-1), each r-separated, union covering at c*r."""

    dim: int
    r: float
    c: float
    classes: list[np.ndarray] = field(default_factory=list)
    m: int = 0

    def __post_init__(self):
        if self.m == 0:
            self.m = len(self.classes)

    @property
    def points(self) -> np.ndarray:
        return np.vstack(self.classes)

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.classes)


_NET_CACHE: dict[tuple, np.ndarray] = {}


def greedy_net(d: int, delta: float, seed: int = 0,
               candidate_cap: int = CANDIDATE_CAP) -> np.ndarray:
    """Maximal delta-separated subset of S^(d-1).

    Farthest-point selection over a quasi-uniform candidate set whose
    resolution is min(delta/2, sampling_slack(d, 1e5)); candidate count
    grows like (4/resolution)^(d-1) and the call fails rather than degrade
    once it exceeds `candidate_cap`.  The result is pairwise >= delta
    separated (up to a 1e-12 relative slack that admits exact ties) and
    every candidate lies within delta of it, so the sphere is covered at
    delta plus the candidate resolution.  Deterministic given (d, delta,
    seed); the seed only moves the starting point.
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if not (0.0 < delta <= 2.0):
        raise ValueError("delta must lie in (0, 2]")
    key = (d, float(delta), int(seed), int(candidate_cap))
    if key in _NET_CACHE:
        return _NET_CACHE[key]
    eps = min(delta / 2.0, sampling_slack(d, COVER_SAMPLES))
    need = int(np.ceil((4.0 / eps) ** (d - 1)))
    if need > candidate_cap:
        raise NetBudgetError(
            f"candidate budget {need} exceeds cap {candidate_cap} "
            f"(d={d}, delta={delta})")
    cand = sphere_candidates(d, need)
    idx = farthest_point_order(cand, start=seed % len(cand),
                               stop_dist=delta * (1.0 - 1e-12))
    net = cand[idx]
    net.setflags(write=False)  # callers share the cached array
    if len(_NET_CACHE) > 64:
        _NET_CACHE.clear()
    _NET_CACHE[key] = net
    return net


def color_net(points: np.ndarray, r: float) -> list[np.ndarray]:
    """Partition `points` into classes with all within-class distances >= r.

    Greedy colouring of the proximity graph (edge iff distance < r,
    strictly), vertices in decreasing degree order with index ties; the
    class count is at most 1 + max degree.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n == 0:
        raise ValueError("points must be nonempty")
    tree = cKDTree(points)
    pairs = tree.query_pairs(r, output_type="ndarray")
    if len(pairs):
        diff = points[pairs[:, 0]] - points[pairs[:, 1]]
        strict = np.einsum("ij,ij->i", diff, diff) < r * r
        pairs = pairs[strict]
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in pairs:
        adj[i].append(int(j))
        adj[j].append(int(i))
    degrees = np.array([len(a) for a in adj])
    order = np.lexsort((np.arange(n), -degrees))
    color = np.full(n, -1, dtype=int)
    for v in order:
        used = {color[w] for w in adj[v] if color[w] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    m = int(color.max()) + 1
    return [points[color == k] for k in range(m)]


def covering_radius(points: np.ndarray, d: int, samples: int = COVER_SAMPLES,
                    seed: int = 0) -> float:
    """Empirical covering radius of `points` over the unit sphere.

    Maximum distance from `samples` quasi-uniform sphere points to the set;
    a lower bound on the true covering radius that converges from below as
    samples grows (resolution bound: sampling_slack(d, samples)).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0:
        raise ValueError("points must be nonempty")
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    probes = sphere_samples(d, samples, seed=seed)
    tree = cKDTree(points)
    dist, _ = tree.query(probes, k=1)
    return float(dist.max())


def _split_classes(classes: list[np.ndarray], target: int) -> list[np.ndarray]:
    # Splitting a class never hurts: subsets of an r-separated set stay
    # r-separated and the union is unchanged.
    classes = [c for c in classes]
    while len(classes) < target:
        sizes = [len(c) for c in classes]
        big = int(np.argmax(sizes))
        if sizes[big] < 2:
            break
        cls = classes[big]
        classes[big] = cls[0::2]
        classes.insert(big + 1, cls[1::2])
    return classes


_CALIBRATION_CACHE: dict[tuple, int] = {}


def calibrated_class_count(d: int, c: float, seed: int = 0) -> int:
    """Class-count ceiling over the calibration ladder.

    Computed once per (d, c, seed) and reused so that the reported class
    count is scale-free: nets built at any r are padded up to it by class
    splitting.
    """
    key = (d, round(c, 12), seed)
    if key not in _CALIBRATION_CACHE:
        counts = []
        for r_cal in CALIBRATION_LADDER:
            pts = greedy_net(d, c * r_cal, seed=seed)
            counts.append(len(color_net(pts, r_cal)))
        _CALIBRATION_CACHE[key] = max(counts)
    return _CALIBRATION_CACHE[key]


def build_separated_families(d: int, r: float, c: float = DEFAULT_C,
                             seed: int = 0,
                             target_m: int | None = None) -> SeparatedNet:
    """Separated families at separation r with covering fraction c.

    Runs :func:`greedy_net` at delta = c*r, colours at threshold r, then
    pads the class list (splitting, which preserves separation) up to the
    calibrated per-(d, c, seed) count so the class count does not depend
    on r.  Guarantees: within-class pairwise distances >= r exactly, and
    the union covers the sphere within c*r up to candidate resolution.
    """
    if not (0.0 < c < 0.5):
        raise ValueError("covering fraction c must lie in (0, 1/2)")
    if r <= 0.0 or c * r > 2.0:
        raise ValueError("need r > 0 and c*r <= 2")
    pts = greedy_net(d, c * r, seed=seed)
    classes = color_net(pts, r)
    target = target_m if target_m is not None else calibrated_class_count(d, c, seed)
    if len(classes) < target:
        classes = _split_classes(classes, target)
    return SeparatedNet(dim=d, r=r, c=c, classes=classes, m=len(classes))
