"""Escape-length auditing: roadmap search for short paths avoiding the discs.

The search is evidence-grade, not proof-grade: it reports the shortest
certified escape path it could find, which upper-bounds the true infimum.
"Passing" a budget M therefore means "no path of length <= M was found at
the configured effort", never a proof that none exists.  Structural
invariants of a labyrinth (tangency, disjointness, separation witnesses,
covering) are audited exactly or to stated tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .config import RIM_STEP, TOL
from .geometry import (
    FlatBall,
    flatball_extremal_points,
    flatball_rim_points,
    point_flatball_distance,
    segment_flatball_intersect,
    separating_hyperplane,
    tangent_basis,
)
from .nets import covering_radius, sampling_slack
from .shells import Labyrinth, sqrt_gap_partial_sums

INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class RoadmapBudgetError(RuntimeError):
    """Free-space sampling rejected nearly everything."""


@dataclass(frozen=True)
class EffortBudget:
    """Search effort: seeds, node budgets and connection parameters."""

    seeds: tuple = (0, 1, 2, 3)
    node_budgets: tuple = (20_000, 80_000)
    clearance: float = 0.0
    rim_step: float = RIM_STEP
    neighbors: int = 10
    connect_factor: float = 2.2
    shortcut_rounds: int = 400

    @staticmethod
    def default(dim: int) -> "EffortBudget":
        if dim <= 2:
            return EffortBudget()
        # Halved budgets beyond the plane; d >= 4 works but is slow.
        return EffortBudget(node_budgets=(10_000, 40_000))

    @staticmethod
    def probe(dim: int) -> "EffortBudget":
        """Cheap effort used inside construction loops."""
        if dim <= 2:
            return EffortBudget(seeds=(0,), node_budgets=(40_000,),
                                shortcut_rounds=200)
        return EffortBudget(seeds=(0,), node_budgets=(16_000,),
                            shortcut_rounds=200)


# ---------------------------------------------------------------------------
# component stacking and vectorised collision tests


@dataclass(eq=False)
class _CompArrays:
    centers: np.ndarray
    normals: np.ndarray
    radii: np.ndarray
    tree: cKDTree | None

    @staticmethod
    def from_components(comps: list[FlatBall]) -> "_CompArrays":
        if not comps:
            return _CompArrays(np.empty((0, 0)), np.empty((0, 0)),
                               np.empty(0), None)
        C = np.array([fb.center for fb in comps])
        N = np.array([fb.normal for fb in comps])
        R = np.array([fb.radius for fb in comps])
        return _CompArrays(C, N, R, cKDTree(C))

    def __len__(self):
        return len(self.radii)


def _points_comp_distance(pts: np.ndarray, comp: _CompArrays,
                          idx: np.ndarray, cidx: np.ndarray) -> np.ndarray:
    """Distances from pts[idx] to discs cidx (aligned pairs)."""
    v = pts[idx] - comp.centers[cidx]
    n = comp.normals[cidx]
    h = np.einsum("ij,ij->i", v, n)
    w = v - h[:, None] * n
    rho = np.linalg.norm(w, axis=1)
    return np.hypot(h, np.maximum(rho - comp.radii[cidx], 0.0))


def _pair_point_distance(P: np.ndarray, C: np.ndarray, N: np.ndarray,
                         R: np.ndarray) -> np.ndarray:
    v = P - C
    h = np.einsum("ij,ij->i", v, N)
    w = v - h[:, None] * N
    rho = np.linalg.norm(w, axis=1)
    return np.hypot(h, np.maximum(rho - R, 0.0))


def _pairs_segdisc_distance(A: np.ndarray, B: np.ndarray, C: np.ndarray,
                            N: np.ndarray, R: np.ndarray,
                            iters: int = 48) -> np.ndarray:
    """Segment-to-disc distance for aligned rows, any dimension.

    Same recipe as the scalar predicate: exact zero on piercing, golden
    section on the convex 1-d restriction otherwise.
    """
    ha = np.einsum("ij,ij->i", A - C, N)
    hb = np.einsum("ij,ij->i", B - C, N)
    crossing = ha * hb <= 0.0
    denom = np.where(ha == hb, 1.0, ha - hb)
    t0 = np.clip(np.where(ha == hb, 0.0, ha / denom), 0.0, 1.0)
    q = A + t0[:, None] * (B - A)
    wq = q - C
    wq = wq - np.einsum("ij,ij->i", wq, N)[:, None] * N
    pierced = crossing & (np.linalg.norm(wq, axis=1) <= R)

    def g(t):
        return _pair_point_distance(A + t[:, None] * (B - A), C, N, R)

    lo = np.zeros(len(A))
    hi = np.ones(len(A))
    x1 = hi - INV_GOLDEN * (hi - lo)
    x2 = lo + INV_GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(iters):
        left = g1 <= g2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x1 = hi - INV_GOLDEN * (hi - lo)
        x2 = lo + INV_GOLDEN * (hi - lo)
        g1, g2 = g(x1), g(x2)
    best = np.minimum.reduce([g(lo), g(hi), g1, g2, g(np.zeros_like(lo)),
                              g(np.ones_like(lo))])
    best[pierced] = 0.0
    return best


def _pairs_segseg_distance_2d(P1, P2, Q1, Q2) -> np.ndarray:
    """Exact segment-segment distance in the plane, vectorised over rows."""

    def cross(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    d1 = cross(P2 - P1, Q1 - P1)
    d2 = cross(P2 - P1, Q2 - P1)
    d3 = cross(Q2 - Q1, P1 - Q1)
    d4 = cross(Q2 - Q1, P2 - Q1)
    proper = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)

    def pt_seg(X, A, B):
        ab = B - A
        denom = np.einsum("ij,ij->i", ab, ab)
        denom = np.where(denom == 0.0, 1.0, denom)
        t = np.clip(np.einsum("ij,ij->i", X - A, ab) / denom, 0.0, 1.0)
        return np.linalg.norm(X - (A + t[:, None] * ab), axis=1)

    dist = np.minimum.reduce([
        pt_seg(Q1, P1, P2), pt_seg(Q2, P1, P2),
        pt_seg(P1, Q1, Q2), pt_seg(P2, Q1, Q2)])
    dist[proper] = 0.0
    return dist


def _segments_collide(A: np.ndarray, B: np.ndarray, comp: _CompArrays,
                      clearance: float) -> np.ndarray:
    """Collision mask for segments [A[i], B[i]] against all components.

    A bounding-sphere cull (sound: a disc lies inside the sphere of its
    centre and radius) limits exact tests to nearby segment/disc pairs.
    """
    n = len(A)
    out = np.zeros(n, dtype=bool)
    if len(comp) == 0 or n == 0:
        return out
    mids = 0.5 * (A + B)
    half = 0.5 * np.linalg.norm(B - A, axis=1)
    reach = half + comp.radii.max() + clearance + 1e-12
    cand = comp.tree.query_ball_point(mids, r=reach)
    idx = np.fromiter((i for i, lst in enumerate(cand) for _ in lst),
                      dtype=np.intp, count=sum(len(lst) for lst in cand))
    cidx = np.fromiter((j for lst in cand for j in lst), dtype=np.intp,
                       count=len(idx))
    if len(idx) == 0:
        return out
    C = comp.centers[cidx]
    N = comp.normals[cidx]
    R = comp.radii[cidx]
    if A.shape[1] == 2:
        U = np.column_stack([-N[:, 1], N[:, 0]])
        dist = _pairs_segseg_distance_2d(A[idx], B[idx],
                                         C - R[:, None] * U, C + R[:, None] * U)
    else:
        dist = _pairs_segdisc_distance(A[idx], B[idx], C, N, R)
    hit = dist <= clearance
    np.logical_or.at(out, idx[hit], True)
    return out


# ---------------------------------------------------------------------------
# regions, roadmaps


def _region_from_domain(lab: Labyrinth, source: dict, target: dict) -> dict:
    kind = lab.domain.get("kind")
    if kind == "annulus":
        return {"kind": "annulus", "inner": lab.domain["inner"],
                "outer": lab.domain["outer"]}
    if kind == "ball" and source.get("kind") == "sphere" \
            and target.get("kind") == "sphere":
        lo = min(source["radius"], target["radius"])
        hi = max(source["radius"], target["radius"])
        return {"kind": "annulus", "inner": lo, "outer": hi}
    pts = [np.asarray(s["coords"], dtype=float)
           for s in (source, target) if s.get("kind") == "point"]
    ext = max([np.linalg.norm(p) for p in pts] + [lab.scale]) + 0.1
    dim = lab.dim
    return {"kind": "box", "lo": [-ext] * dim, "hi": [ext] * dim}


def _region_box(region: dict, dim: int) -> tuple[np.ndarray, np.ndarray]:
    kind = region["kind"]
    if kind == "annulus":
        r = float(region["outer"])
        return -r * np.ones(dim), r * np.ones(dim)
    if kind == "ball":
        r = float(region["radius"])
        return -r * np.ones(dim), r * np.ones(dim)
    if kind == "box":
        return np.asarray(region["lo"], dtype=float), np.asarray(region["hi"], dtype=float)
    raise ValueError(f"unknown region kind {kind!r}")


def _region_contains(region: dict, pts: np.ndarray) -> np.ndarray:
    kind = region["kind"]
    if kind == "annulus":
        r = np.linalg.norm(pts, axis=1)
        return (r > region["inner"]) & (r < region["outer"])
    if kind == "ball":
        return np.linalg.norm(pts, axis=1) < region["radius"]
    if kind == "box":
        lo, hi = _region_box(region, pts.shape[1])
        return np.all((pts > lo) & (pts < hi), axis=1)
    raise ValueError(f"unknown region kind {kind!r}")


def _region_measure(region: dict, dim: int) -> float:
    lo, hi = _region_box(region, dim)
    box = float(np.prod(hi - lo))
    if region["kind"] == "annulus" and dim == 2:
        return np.pi * (region["outer"] ** 2 - region["inner"] ** 2)
    if region["kind"] == "ball" and dim == 2:
        return np.pi * region["radius"] ** 2
    return box


@dataclass(eq=False)
class Roadmap:
    """Collision-checked geometric graph over the free space of a region."""

    nodes: np.ndarray
    graph: sparse.csr_matrix
    region: dict
    clearance: float
    connect_radius: float
    comp: _CompArrays = None
    n_free: int = 0
    n_rim: int = 0


def build_roadmap(region: dict, lab: Labyrinth, node_budget: int,
                  clearance: float = 0.0, seed: int = 0,
                  effort: EffortBudget | None = None) -> Roadmap:
    """Quasi-uniform free samples plus rim-hugging offsets, k-NN connected.

    Free-space samples are drawn from a scrambled Sobol stream and rejected
    when within `clearance` of a component or outside the region; every
    component rim point additionally gets a small ring of nodes at offset
    clearance + rim_step, which is where taut escape paths turn.  Edges are
    the union of radius-neighbour and k-nearest pairs whose segments clear
    all components at the given clearance.
    """
    if node_budget < 100:
        raise ValueError("node budget must be at least 100")
    effort = effort or EffortBudget.default(lab.dim)
    dim = lab.dim
    comp = _CompArrays.from_components(lab.components)

    rim_nodes = _rim_offset_nodes(lab, comp, clearance, effort.rim_step,
                                  region, node_budget)
    rim_nodes = rim_nodes[:node_budget // 2]
    free_target = node_budget - len(rim_nodes)

    lo, hi = _region_box(region, dim)
    sob = qmc.Sobol(dim, scramble=True, seed=seed)
    accepted = []
    got = 0
    drawn = 0
    while got < free_target:
        chunk = sob.random(16384) * (hi - lo) + lo
        drawn += len(chunk)
        keep = _region_contains(region, chunk)
        pts = chunk[keep]
        if len(pts) and len(comp):
            reach = comp.radii.max() + clearance + 1e-12
            cand = comp.tree.query_ball_point(pts, r=reach)
            bad = np.zeros(len(pts), dtype=bool)
            idx = np.fromiter((i for i, lst in enumerate(cand) for _ in lst),
                              dtype=np.intp,
                              count=sum(len(lst) for lst in cand))
            cidx = np.fromiter((j for lst in cand for j in lst),
                               dtype=np.intp, count=len(idx))
            if len(idx):
                dist = _points_comp_distance(pts, comp, idx, cidx)
                hit = dist <= clearance
                np.logical_or.at(bad, idx[hit], True)
            pts = pts[~bad]
        accepted.append(pts)
        got += len(pts)
        if drawn >= 1000 * node_budget:
            raise RoadmapBudgetError(
                "rejection rate above 99.9%: region nearly filled by the "
                "clearance zone")
    free_nodes = np.vstack(accepted)[:free_target] if accepted else \
        np.empty((0, dim))
    nodes = np.vstack([free_nodes, rim_nodes]) if len(rim_nodes) else free_nodes

    measure = _region_measure(region, dim)
    connect_radius = effort.connect_factor * (measure / max(len(nodes), 1)) ** (1.0 / dim)
    tree = cKDTree(nodes)
    pairs = tree.query_pairs(connect_radius, output_type="ndarray")
    k = min(effort.neighbors + 1, len(nodes))
    _, nbr = tree.query(nodes, k=k)
    ii = np.repeat(np.arange(len(nodes)), k - 1)
    jj = nbr[:, 1:].ravel()
    knn_pairs = np.column_stack([np.minimum(ii, jj), np.maximum(ii, jj)])
    all_pairs = np.vstack([pairs, knn_pairs]) if len(pairs) else knn_pairs
    all_pairs = np.unique(all_pairs, axis=0)
    all_pairs = all_pairs[all_pairs[:, 0] != all_pairs[:, 1]]

    A = nodes[all_pairs[:, 0]]
    B = nodes[all_pairs[:, 1]]
    collide = _segments_collide(A, B, comp, clearance)
    ok = all_pairs[~collide]
    w = np.linalg.norm(nodes[ok[:, 0]] - nodes[ok[:, 1]], axis=1)
    n = len(nodes)
    graph = sparse.csr_matrix(
        (np.concatenate([w, w]),
         (np.concatenate([ok[:, 0], ok[:, 1]]),
          np.concatenate([ok[:, 1], ok[:, 0]]))), shape=(n, n))
    return Roadmap(nodes=nodes, graph=graph, region=region,
                   clearance=clearance, connect_radius=connect_radius,
                   comp=comp, n_free=len(free_nodes), n_rim=len(rim_nodes))


def _rim_offset_nodes(lab: Labyrinth, comp: _CompArrays, clearance: float,
                      rim_step: float, region: dict,
                      node_budget: int) -> np.ndarray:
    if lab.is_empty:
        return np.empty((0, lab.dim))
    offset = clearance + rim_step
    rim_count = 12 if lab.dim >= 3 else 2
    # Fit the rings into half the node budget by thinning the ring, never
    # by dropping whole components.
    per_tip_cap = (node_budget // 2) // max(1, len(lab.components) * rim_count)
    ring = int(np.clip(per_tip_cap, 2, 8))
    out = []
    for fb in lab.components:
        rim = flatball_rim_points(fb, rim_count)
        B = tangent_basis(fb.normal)
        for e in rim:
            u = e - fb.center
            nu = np.linalg.norm(u)
            u = u / nu if nu > 0 else B[:, 0]
            ang = 2.0 * np.pi * np.arange(ring) / ring
            out.append(e + offset * (np.outer(np.cos(ang), u)
                                     + np.outer(np.sin(ang), fb.normal)))
    pts = np.vstack(out)
    keep = _region_contains(region, pts)
    pts = pts[keep]
    if len(pts) and len(comp):
        reach = comp.radii.max() + clearance + 1e-12
        cand = comp.tree.query_ball_point(pts, r=reach)
        bad = np.zeros(len(pts), dtype=bool)
        idx = np.fromiter((i for i, lst in enumerate(cand) for _ in lst),
                          dtype=np.intp, count=sum(len(lst) for lst in cand))
        cidx = np.fromiter((j for lst in cand for j in lst), dtype=np.intp,
                           count=len(idx))
        if len(idx):
            dist = _points_comp_distance(pts, comp, idx, cidx)
            np.logical_or.at(bad, idx[dist <= clearance], True)
        pts = pts[~bad]
    return pts


# ---------------------------------------------------------------------------
# paths


@dataclass(eq=False)
class EscapePath:
    """Certified collision-free polyline between the source and target sets."""

    polyline: np.ndarray
    length: float
    clearance: float

    def __post_init__(self):
        self.polyline = np.asarray(self.polyline, dtype=float)
        steps = np.linalg.norm(np.diff(self.polyline, axis=0), axis=1)
        if np.any(steps == 0.0):
            raise ValueError("consecutive path points must differ")
        recomputed = float(steps.sum())
        if abs(recomputed - self.length) > 1e-12 * max(1.0, recomputed):
            raise ValueError("stored length disagrees with the polyline")


def path_length(polyline: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(np.asarray(polyline, float), axis=0),
                                axis=1).sum())


def _project_to_set(descr: dict, x: np.ndarray) -> np.ndarray:
    if descr["kind"] == "sphere":
        r = float(descr["radius"])
        nx = np.linalg.norm(x)
        if nx == 0.0:
            raise ValueError("cannot project the origin onto a sphere")
        return x * (r / nx)
    if descr["kind"] == "point":
        return np.asarray(descr["coords"], dtype=float)
    raise ValueError(f"unknown set descriptor {descr['kind']!r}")


def _set_distance(descr: dict, pts: np.ndarray) -> np.ndarray:
    if descr["kind"] == "sphere":
        return np.abs(np.linalg.norm(pts, axis=1) - descr["radius"])
    if descr["kind"] == "point":
        return np.linalg.norm(pts - np.asarray(descr["coords"], float), axis=1)
    raise ValueError(f"unknown set descriptor {descr['kind']!r}")


def shortest_escape(rm: Roadmap, source: dict, target: dict) -> EscapePath | None:
    """Shortest roadmap path from the source set to the target set.

    Boundary nodes are linked to their projections onto the sets (collision
    checked), then a single Dijkstra run over the augmented graph extracts
    the minimum-length connection.  None means the roadmap is disconnected
    at this resolution, which is never evidence that no path exists.
    """
    n = len(rm.nodes)
    links = []
    for descr in (source, target):
        d = _set_distance(descr, rm.nodes)
        near = np.flatnonzero(d <= max(rm.connect_radius * 1.5, 1e-9))
        if descr["kind"] == "point":
            k = min(n, 24)
            near = np.union1d(near, np.argsort(d)[:k])
        if len(near) == 0:
            return None
        proj = np.array([_project_to_set(descr, rm.nodes[i]) for i in near])
        collide = _segments_collide(rm.nodes[near], proj, rm.comp, rm.clearance)
        moved = np.linalg.norm(rm.nodes[near] - proj, axis=1)
        ok = ~collide
        links.append((near[ok], np.maximum(moved[ok], 1e-300)))
        if not np.any(ok):
            return None
    src_i, src_w = links[0]
    tgt_i, tgt_w = links[1]
    S, T = n, n + 1
    rows = np.concatenate([np.full(len(src_i), S), src_i,
                           np.full(len(tgt_i), T), tgt_i])
    cols = np.concatenate([src_i, np.full(len(src_i), S),
                           tgt_i, np.full(len(tgt_i), T)])
    vals = np.concatenate([src_w, src_w, tgt_w, tgt_w])
    g = rm.graph.tocoo()
    big = sparse.csr_matrix(
        (np.concatenate([g.data, vals]),
         (np.concatenate([g.row, rows]), np.concatenate([g.col, cols]))),
        shape=(n + 2, n + 2))
    dist, pred = dijkstra(big, directed=False, indices=S,
                          return_predecessors=True)
    if not np.isfinite(dist[T]):
        return None
    chain = []
    v = T
    while v != S and v >= 0:
        chain.append(v)
        v = pred[v]
    chain.append(S)
    chain = chain[::-1]
    inner = [i for i in chain if i < n]
    if not inner:
        return None
    poly = [_project_to_set(source, rm.nodes[inner[0]])]
    poly.extend(rm.nodes[i] for i in inner)
    poly.append(_project_to_set(target, rm.nodes[inner[-1]]))
    poly = _dedupe(np.asarray(poly))
    return EscapePath(polyline=poly, length=path_length(poly),
                      clearance=rm.clearance)


def _dedupe(poly: np.ndarray) -> np.ndarray:
    keep = [0]
    for i in range(1, len(poly)):
        if np.linalg.norm(poly[i] - poly[keep[-1]]) > 0.0:
            keep.append(i)
    return poly[keep]


def shortcut(path: EscapePath, lab: Labyrinth, rounds: int = 400,
             seed: int = 0) -> EscapePath:
    """Randomised two-point shortcutting; length never increases.

    Random pairs of points along the polyline are joined by a straight
    segment whenever that segment clears every component at the path's
    clearance; a final vertex-skipping pass removes leftover corners.
    """
    comp = _CompArrays.from_components(lab.components)
    rng = np.random.default_rng(seed)
    poly = [p.copy() for p in path.polyline]
    for _ in range(rounds):
        if len(poly) < 3:
            break
        i, j = sorted(rng.integers(0, len(poly) - 1, size=2))
        ti, tj = rng.random(2)
        a = poly[i] + ti * (poly[i + 1] - poly[i])
        b = poly[j] + tj * (poly[j + 1] - poly[j])
        if j <= i or np.linalg.norm(b - a) == 0.0:
            continue
        if _segments_collide(a[None, :], b[None, :], comp, path.clearance)[0]:
            continue
        poly = poly[:i + 1] + [a, b] + poly[j + 1:]
    # deterministic vertex-skipping sweep
    changed = True
    while changed:
        changed = False
        k = 0
        while k + 2 < len(poly):
            a, b = poly[k], poly[k + 2]
            if np.linalg.norm(b - a) > 0.0 and not _segments_collide(
                    a[None, :], b[None, :], comp, path.clearance)[0]:
                del poly[k + 1]
                changed = True
            else:
                k += 1
    poly = _dedupe(np.asarray(poly))
    new = EscapePath(polyline=poly, length=path_length(poly),
                     clearance=path.clearance)
    if new.length > path.length:
        return path
    return new


def verify_path(path: EscapePath, lab: Labyrinth, source: dict | None = None,
                target: dict | None = None) -> bool:
    """Literal re-verification of every path segment against every component."""
    poly = path.polyline
    for a, b in zip(poly[:-1], poly[1:]):
        for fb in lab.components:
            if segment_flatball_intersect((a, b), fb, path.clearance):
                return False
    if source is not None and _set_distance(source, poly[:1])[0] > 1e-9:
        return False
    if target is not None and _set_distance(target, poly[-1:])[0] > 1e-9:
        return False
    return True


def min_escape_length(lab: Labyrinth, source: dict, target: dict,
                      effort: EffortBudget | None = None,
                      region: dict | None = None) -> dict:
    """Multi-start upper-bound search for the shortest escape path.

    Loops over node budgets and seeds, keeps the shortest certified path
    found, and reports it together with the attempts.  The reported value
    is an upper bound on the true infimum over escape paths; the meaningful
    acceptance statement is "no path shorter than the budget was found at
    this effort".
    """
    effort = effort or EffortBudget.default(lab.dim)
    region = region or _region_from_domain(lab, source, target)
    best: EscapePath | None = None
    attempts = []
    for budget in effort.node_budgets:
        for seed in effort.seeds:
            rm = build_roadmap(region, lab, budget, effort.clearance,
                               seed=seed * 1_000_003 + budget, effort=effort)
            path = shortest_escape(rm, source, target)
            if path is not None:
                path = shortcut(path, lab, rounds=effort.shortcut_rounds,
                                seed=seed)
                if not verify_path(path, lab, source, target):
                    path = None
            attempts.append({"seed": seed, "nodes": int(budget),
                             "length": None if path is None else path.length})
            if path is not None and (best is None or path.length < best.length):
                best = path
    note = ("reported length is an upper bound on the true escape infimum; "
            "'no shorter path found' is evidence at this effort, not a proof")
    if lab.dim >= 4:
        note += " (dimension >= 4: expect long runtimes)"
    return {
        "best_length": None if best is None else best.length,
        "best_path": best,
        "attempts": attempts,
        "upper_bound": True,
        "note": note,
    }


# ---------------------------------------------------------------------------
# structural audit


def _pairwise_min_distance(lab: Labyrinth) -> float:
    """Minimum distance between distinct components.

    Candidate pairs come from a sound centre-distance cull: pairs beyond
    the cull radius are at least `slack` apart, so when no candidate pair
    exists that slack is returned as a valid positive lower bound.
    """
    comps = lab.components
    n = len(comps)
    if n < 2:
        return np.inf
    C = np.array([fb.center for fb in comps])
    N = np.array([fb.normal for fb in comps])
    R = np.array([fb.radius for fb in comps])
    slack = 0.05
    reach = 2.0 * R.max() + slack
    tree = cKDTree(C)
    pairs = tree.query_pairs(reach, output_type="ndarray")
    if len(pairs) == 0:
        return slack
    i, j = pairs[:, 0], pairs[:, 1]
    if lab.dim == 2:
        U = np.column_stack([-N[:, 1], N[:, 0]])
        P1 = C[i] - R[i, None] * U[i]
        P2 = C[i] + R[i, None] * U[i]
        Q1 = C[j] - R[j, None] * U[j]
        Q2 = C[j] + R[j, None] * U[j]
        dmin = float(_pairs_segseg_distance_2d(P1, P2, Q1, Q2).min())
    else:
        dmin = _alternating_projection_min(C[i], N[i], R[i], C[j], N[j], R[j])
    return min(dmin, slack)


def _alternating_projection_min(C1, N1, R1, C2, N2, R2, iters: int = 400,
                                tol: float = 1e-10) -> float:
    def proj(X, C, N, R):
        v = X - C
        h = np.einsum("ij,ij->i", v, N)
        w = v - h[:, None] * N
        rho = np.linalg.norm(w, axis=1)
        scale = np.where(rho > R, np.where(rho == 0.0, 1.0, R / np.maximum(rho, 1e-300)), 1.0)
        return C + w * scale[:, None]

    x = C1.copy()
    prev = np.full(len(C1), np.inf)
    for _ in range(iters):
        y = proj(x, C2, N2, R2)
        x = proj(y, C1, N1, R1)
        d = np.linalg.norm(x - y, axis=1)
        if np.all(prev - d < tol):
            break
        prev = d
    return float(d.min())


def audit_labyrinth(lab: Labyrinth, lex_margin: float | None = None,
                    lex_component_cap: int = 400,
                    cover_samples: int = 20_000) -> dict:
    """Run every structural check and report pass/fail with measurements.

    Included checks: component well-formedness, tangency to the recorded
    sublevel spheres, strict clearance below the next sublevel sphere,
    pairwise disjointness, lexicographic hyperplane witnesses (desk-scale
    runs only), domain containment, schedule divergence, and per-shell net
    separation/covering.  Patch-assembled labyrinths replace the shell
    checks with collar monotonicity and defining-function containment.
    Failures are report entries, never exceptions.
    """
    if lex_margin is None:
        lex_margin = TOL.lp_margin_floor
    if lab.is_empty:
        return {"empty": True, "passed": True, "checks": [],
                "note": "empty labyrinth: all checks hold vacuously"}
    checks = []

    def add(name: str, passed: bool, **details):
        entry = {"name": name, "passed": bool(passed)}
        entry.update(details)
        checks.append(entry)

    comps = lab.components
    norm_err = max(abs(np.linalg.norm(fb.normal) - 1.0) for fb in comps)
    add("components-well-formed",
        norm_err <= 1e-9 and all(fb.radius > 0 for fb in comps),
        max_normal_error=norm_err)

    rims = [flatball_rim_points(fb, 64 * lab.dim) for fb in comps]

    if lab.kind == "shell" and lab.schedule is not None:
        sched = lab.schedule
        tang_err = 0.0
        level_err = 0.0
        clear_margin = np.inf
        worst = None
        for fb, rim in zip(comps, rims):
            j, k, _ = fb.level
            s_jk = lab.scale * float(sched.sublevels[j - 1, k - 1])
            tang_err = max(tang_err, abs(float(fb.center @ fb.normal)
                                         - np.linalg.norm(fb.center)))
            level_err = max(level_err, abs(np.linalg.norm(fb.center) - s_jk))
            margin = lab.scale * sched.sublevel_above(j, k) \
                - float(np.linalg.norm(rim, axis=1).max())
            if margin < clear_margin:
                clear_margin = margin
                worst = fb.level
        add("tangency", tang_err <= 1e-9 and level_err <= 1e-9,
            tangency_error=tang_err, sublevel_error=level_err)
        add("next-sublevel-clearance", clear_margin > 1e-9,
            min_margin=clear_margin, worst_component=worst)

        sums = sqrt_gap_partial_sums(sched)
        target = 0.4 * np.sqrt(1.0 - sched.s0) * np.log(np.arange(1, sched.J + 1) + 1.0)
        add("schedule-divergence", bool(np.all(sums > target)),
            partial_sums=[float(x) for x in sums])

        sep_ok = True
        cov_ok = True
        cov_slack = sampling_slack(lab.dim, cover_samples)
        for net in lab.nets:
            for cls in net.classes:
                if len(cls) > 1:
                    t = cKDTree(cls)
                    dd, _ = t.query(cls, k=2)
                    if dd[:, 1].min() < net.r:
                        sep_ok = False
            cov = covering_radius(net.points, lab.dim, cover_samples, seed=7)
            if cov > net.c * net.r + cov_slack:
                cov_ok = False
        add("net-separation", sep_ok)
        add("net-covering", cov_ok, slack=cov_slack)

    dmin = _pairwise_min_distance(lab)
    add("pairwise-disjoint", dmin > 0.0, min_distance=float(dmin))

    add_containment_check(lab, rims, add)

    if lab.kind == "patch":
        widths = lab.collar_widths
        mono = all(widths[i] > widths[i + 1] for i in range(len(widths) - 1))
        add("collar-nesting", mono and (not widths or widths[-1] > 0.0),
            widths=[float(w) for w in widths])

    if lab.kind == "shell" and lab.dim <= 3 \
            and (lab.schedule is None or lab.schedule.J <= 4) \
            and len(comps) <= lex_component_cap:
        # LP sampling density: exact in the plane (a segment's hull is its
        # endpoints), 64 points per dimension on the rim otherwise
        samples = [flatball_extremal_points(fb, 2 if lab.dim == 2
                                            else 64 * lab.dim)
                   for fb in comps]
        worst_margin = np.inf
        failed_at = None
        for i in range(1, len(comps)):
            h = separating_hyperplane(samples[i], np.vstack(samples[:i]),
                                      margin=lex_margin)
            if h is None:
                failed_at = comps[i].level
                break
            m = min(float(np.min(samples[i] @ h.normal) - h.offset),
                    float(h.offset - np.max(np.vstack(samples[:i]) @ h.normal)))
            worst_margin = min(worst_margin, m)
        add("lex-hyperplane-witnesses", failed_at is None,
            worst_margin=None if failed_at else float(worst_margin),
            failed_component=failed_at)

    return {"empty": False, "passed": all(c["passed"] for c in checks),
            "checks": checks}


def add_containment_check(lab: Labyrinth, rims, add) -> None:
    pts = np.vstack(rims + [np.array([fb.center for fb in lab.components])])
    kind = lab.domain.get("kind")
    if kind == "ball":
        lim = lab.scale if lab.scale != 1.0 else 1.0
        mx = float(np.linalg.norm(pts, axis=1).max())
        add("containment", mx < lim, max_norm=mx, bound=lim)
    elif kind == "annulus":
        r = np.linalg.norm(pts, axis=1)
        add("containment",
            float(r.min()) > lab.domain["inner"] and float(r.max()) < lab.domain["outer"],
            min_norm=float(r.min()), max_norm=float(r.max()))
    elif kind == "ellipsoid":
        if "to_ball" in lab.domain:
            # components are stored in ball coordinates; containment in the
            # ellipsoid is exactly containment of the stored discs in the
            # unit ball
            mx = float(np.linalg.norm(pts, axis=1).max())
            add("containment", mx < 1.0, max_norm=mx, bound=1.0)
        else:
            A = np.asarray(lab.domain["matrix"], dtype=float)
            q = np.einsum("ij,jk,ik->i", pts, A, pts)
            add("containment", float(q.max()) < 1.0,
                max_quadratic=float(q.max()))
    elif kind == "smooth":
        from .domains import resolve_domain, rho_values

        dom = resolve_domain(lab.domain)
        vals = rho_values(dom, pts)
        add("containment", float(vals.max()) < 0.0,
            max_defining_value=float(vals.max()))
    else:
        add("containment", False, error=f"unknown domain kind {kind!r}")
