"""Convex domains beyond the ball: ellipsoids exactly, smooth domains locally.

Ellipsoids are handled by one global linear change of coordinates.  Smooth
strictly convex domains get local affine osculating maps at boundary
points, a patch cover of the boundary with a certified gap delta, and a
round-robin schedule that stacks shrinking collars of disc layers; each
patch appears often enough that either a path crosses a full local stack
or it pays delta per patch transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .config import DEFAULT_C, DEFAULT_T
from .geometry import FlatBall, tangent_basis, unit_vector
from .shells import Labyrinth, build_shell, schedule_from_radii


class CoverageError(RuntimeError):
    """Patch shrinking could not keep the boundary covered with a gap."""


class CollarCollapseError(RuntimeError):
    """Collar width fell below the floor before the schedule finished."""


@dataclass(eq=False)
class ConvexDomain:
    """Bounded convex domain {rho < 0} containing the origin.

    kind "ball" and "ellipsoid" carry exact data; kind "smooth" carries a
    defining function with gradient and Hessian callables, required to be
    strictly convex on the boundary (tangential Hessian positive definite
    at sampled boundary points, validated at construction).
    """

    kind: str
    dim: int
    matrix: np.ndarray | None = None
    rho: Callable[[np.ndarray], float] | None = None
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    hess: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def descriptor(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball"}
        if self.kind == "ellipsoid":
            return {"kind": "ellipsoid", "matrix": self.matrix.tolist()}
        return {"kind": "smooth", "preset": self.name}


def ball_domain(dim: int = 2) -> ConvexDomain:
    return ConvexDomain(kind="ball", dim=dim, matrix=np.eye(dim), name="ball")


def ellipsoid_domain(matrix) -> ConvexDomain:
    """Domain {x : x' A x < 1}; A must be symmetric positive definite."""
    A = np.asarray(matrix, dtype=float)
    if A.shape[0] != A.shape[1] or not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("shape matrix must be symmetric")
    if np.linalg.eigvalsh(A).min() <= 1e-10:
        raise ValueError("shape matrix must be positive definite")
    return ConvexDomain(kind="ellipsoid", dim=A.shape[0], matrix=A,
                        name="ellipsoid")


def _smooth_domain(name: str, dim: int, rho, grad, hess,
                   validation_samples: int = 257) -> ConvexDomain:
    dom = ConvexDomain(kind="smooth", dim=dim, rho=rho, grad=grad, hess=hess,
                       name=name)
    if rho(np.zeros(dim)) >= 0.0:
        raise ValueError("smooth domain must contain the origin")
    for x in boundary_samples(dom, validation_samples):
        g = grad(x)
        ng = np.linalg.norm(g)
        if ng < 1e-12:
            raise ValueError("defining function has vanishing gradient on "
                             "the boundary")
        B = tangent_basis(g / ng)
        Ht = B.T @ hess(x) @ B
        if np.linalg.eigvalsh(0.5 * (Ht + Ht.T)).min() <= 1e-10:
            raise ValueError(f"domain {name!r} is not strictly convex at "
                             f"boundary point {x}")
    return dom


def ellipse_preset() -> ConvexDomain:
    """The ellipse x^2/4 + y^2 < 1."""
    diag = np.array([0.25, 1.0])

    def rho(x):
        x = np.asarray(x, dtype=float)
        return np.sum(diag * x ** 2, axis=-1) - 1.0

    def grad(x):
        return 2.0 * diag * np.asarray(x, dtype=float)

    return _smooth_domain("ellipse", 2, rho, grad,
                          lambda x: 2.0 * np.diag(diag))


def superellipse_preset() -> ConvexDomain:
    """Quartic x^4 + y^4 regularised by 0.05|x|^2 so curvature stays positive.

    The pure quartic has vanishing curvature at the axis points, which the
    strict-convexity gate rejects; the small quadratic term keeps the
    quartic shape while making the tangential Hessian positive everywhere.
    """
    lam = 0.05

    def rho(x):
        x = np.asarray(x, dtype=float)
        return np.sum(x ** 4 + lam * x ** 2, axis=-1) - (1.0 + lam)

    def grad(x):
        x = np.asarray(x, dtype=float)
        return 4.0 * x ** 3 + 2.0 * lam * x

    def hess(x):
        return np.diag(12.0 * np.asarray(x, dtype=float) ** 2 + 2.0 * lam)

    return _smooth_domain("superellipse", 2, rho, grad, hess)


PRESETS = {"ellipse": ellipse_preset, "superellipse": superellipse_preset}


def resolve_domain(descriptor: dict) -> ConvexDomain:
    kind = descriptor.get("kind")
    if kind == "ball":
        return ball_domain(descriptor.get("dim", 2))
    if kind == "ellipsoid":
        return ellipsoid_domain(np.asarray(descriptor["matrix"], dtype=float))
    if kind == "smooth":
        name = descriptor.get("preset")
        if name not in PRESETS:
            raise ValueError(f"unknown smooth preset {name!r}")
        return PRESETS[name]()
    raise ValueError(f"unknown domain kind {kind!r}")


def boundary_point(dom: ConvexDomain, direction: np.ndarray) -> np.ndarray:
    """Boundary point along a ray from the origin."""
    u = unit_vector(direction)
    if dom.kind == "ball":
        return u
    if dom.kind == "ellipsoid":
        return u / np.sqrt(float(u @ dom.matrix @ u))
    hi = 1.0
    while dom.rho(hi * u) < 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise ValueError("domain appears unbounded along a ray")
    t = brentq(lambda s: dom.rho(s * u), 0.0, hi, xtol=1e-14)
    return t * u


def boundary_samples(dom: ConvexDomain, count: int) -> np.ndarray:
    """Dense boundary sampling by radial root finding (d = 2: angles)."""
    if dom.dim != 2:
        from .sampling import sphere_samples

        dirs = sphere_samples(dom.dim, count, seed=11)
    else:
        theta = 2.0 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    return np.vstack([boundary_point(dom, u) for u in dirs])


def boundary_distance(dom: ConvexDomain, pts: np.ndarray) -> np.ndarray:
    """Distance to the boundary, accurate near it.

    Gradient-descent Newton steps project each point onto the zero set of
    the defining function; for points within a thin collar this converges
    in a few steps and the travelled distance matches the true boundary
    distance to second order, which is where the collar bookkeeping needs
    accuracy.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if dom.kind == "ball":
        return 1.0 - np.linalg.norm(pts, axis=1)
    if dom.kind == "ellipsoid":
        q = np.sqrt(np.einsum("ij,jk,ik->i", pts, dom.matrix, pts))
        scale = np.where(q > 0.0, 1.0 / np.maximum(q, 1e-300), 0.0)
        return np.linalg.norm(pts - pts * scale[:, None], axis=1)
    x = pts.copy()
    for _ in range(8):
        vals = np.asarray(dom.rho(x))
        if np.all(np.abs(vals) < 1e-13):
            break
        grads = np.asarray(dom.grad(x))
        gg = np.einsum("ij,ij->i", grads, grads)
        x = x - (vals / np.maximum(gg, 1e-300))[:, None] * grads
    return np.linalg.norm(pts - x, axis=1)


# ---------------------------------------------------------------------------
# ellipsoid: exact global normalisation


@dataclass(eq=False)
class EllipsoidMap:
    """Linear change of coordinates T with T(domain) = unit ball."""

    to_ball: np.ndarray
    to_domain: np.ndarray
    norm_to_ball: float
    norm_to_domain: float


def normalize_ellipsoid(matrix) -> EllipsoidMap:
    """Principal square root of the shape matrix, with operator norms.

    Escape lengths transform within the reported condition-number bounds:
    a path gamma in the ellipsoid maps to T gamma in the ball with
    len(T gamma) <= |T| len(gamma), and back with |T^-1|.
    """
    A = np.asarray(matrix, dtype=float)
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    if w.min() <= 1e-10:
        raise ValueError("shape matrix must be positive definite")
    T = V @ np.diag(np.sqrt(w)) @ V.T
    Ti = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    return EllipsoidMap(to_ball=T, to_domain=Ti,
                        norm_to_ball=float(np.sqrt(w.max())),
                        norm_to_domain=float(1.0 / np.sqrt(w.min())))


def ellipsoid_labyrinth(dom: ConvexDomain, schedule, seed: int = 0) -> Labyrinth:
    """Ball labyrinth pulled back through the ellipsoid normalisation.

    Components are kept in ball coordinates; the labyrinth's domain record
    carries the linear map, so exports and escape-length statements remain
    exact (verification runs in ball coordinates and transfers through the
    operator-norm bounds).
    """
    from .shells import build_labyrinth

    emap = normalize_ellipsoid(dom.matrix)
    lab = build_labyrinth(schedule, dom.dim, seed=seed)
    lab.domain = {"kind": "ellipsoid", "matrix": dom.matrix.tolist(),
                  "to_ball": emap.to_ball.tolist(),
                  "norm_to_ball": emap.norm_to_ball,
                  "norm_to_domain": emap.norm_to_domain}
    return lab


def map_flatball_2d(fb: FlatBall, linear: np.ndarray,
                    offset: np.ndarray) -> FlatBall:
    """Exact affine image of a planar flat ball (segments map to segments).

    The image normal is only defined up to sign; the sign pointing away
    from the origin is chosen so tangency reads the same as in the shell
    construction.
    """
    u = np.array([-fb.normal[1], fb.normal[0]])
    c = linear @ fb.center + offset
    v = linear @ (fb.radius * u)
    r = float(np.linalg.norm(v))
    n = np.array([-v[1], v[0]]) / r
    if n @ c < 0.0:
        n = -n
    return FlatBall(center=c, normal=n, radius=r, level=fb.level)


# ---------------------------------------------------------------------------
# local osculating charts for smooth domains


@dataclass(eq=False)
class OsculatingMap:
    """Affine chart at a boundary point sending the domain to ~unit ball.

    Under z = linear @ (y - base) + e1 the defining function agrees with
    |z|^2 - 1 to second order at the base point; `validity_radius` bounds
    the chart domain so that |(|z| - 1)| <= deviation_bound on the boundary
    within it.
    """

    base: np.ndarray
    outward: np.ndarray
    linear: np.ndarray
    inverse: np.ndarray
    validity_radius: float
    deviation_bound: float
    normal_scale: float

    def to_ball(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        e1 = np.zeros(self.linear.shape[0])
        e1[0] = 1.0
        if y.ndim == 1:
            return self.linear @ (y - self.base) + e1
        return (y - self.base) @ self.linear.T + e1

    def to_domain(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        e1 = np.zeros(self.linear.shape[0])
        e1[0] = 1.0
        if z.ndim == 1:
            return self.inverse @ (z - e1) + self.base
        return (z - e1) @ self.inverse.T + self.base


def osculating_map(dom: ConvexDomain, x: np.ndarray,
                   deviation_bound: float = 0.05) -> OsculatingMap:
    """Second-order normalising chart at boundary point x.

    The outward normal goes to the first axis and the tangential directions
    are rescaled by the square roots of the curvature eigenvalues, so the
    boundary osculates the unit sphere at e1 exactly to second order.  The
    validity radius is measured by sampling: the largest tested chart
    radius within which the boundary stays within `deviation_bound` of the
    osculating sphere.  The bound is a domain-space distance; in chart
    coordinates it corresponds to |(|z| - 1)| <= normal_scale * bound,
    which matters on flat boundary stretches where the chart compresses.
    """
    x = np.asarray(x, dtype=float)
    if dom.kind == "smooth":
        if abs(dom.rho(x)) > 1e-9:
            raise ValueError("base point must lie on the boundary")
        g = dom.grad(x)
        H = dom.hess(x)
    elif dom.kind == "ellipsoid":
        if abs(float(x @ dom.matrix @ x) - 1.0) > 1e-9:
            raise ValueError("base point must lie on the boundary")
        g = 2.0 * dom.matrix @ x
        H = 2.0 * dom.matrix
    else:
        if abs(np.linalg.norm(x) - 1.0) > 1e-9:
            raise ValueError("base point must lie on the boundary")
        g = 2.0 * x
        H = 2.0 * np.eye(dom.dim)
    ng = float(np.linalg.norm(g))
    n_out = g / ng
    B = tangent_basis(n_out)
    Ht = B.T @ H @ B
    Ht = 0.5 * (Ht + Ht.T)
    lam, U = np.linalg.eigh(Ht)
    if lam.min() <= 1e-12:
        raise ValueError("tangential Hessian is degenerate at the base point")
    # normal scale from the mean curvature eigenvalue; tangential scales
    # absorb the anisotropy so the second-order match is exact regardless
    s_n = float(lam.mean()) / ng
    Bscale = np.sqrt(s_n * lam / ng)
    e1 = np.zeros(dom.dim)
    e1[0] = 1.0
    L = np.outer(e1, s_n * n_out) \
        + np.vstack([np.zeros(dom.dim), (Bscale[:, None] * U.T) @ B.T])
    Li = np.linalg.inv(L)

    validity = _measure_validity(dom, x, n_out, B, L, s_n * deviation_bound)
    return OsculatingMap(base=x, outward=n_out, linear=L, inverse=Li,
                         validity_radius=validity,
                         deviation_bound=deviation_bound, normal_scale=s_n)


def _measure_validity(dom, x, n_out, B, L, chart_deviation,
                      dirs: int = 16, steps: int = 24) -> float:
    """Largest sampled chart radius keeping |(|z|-1)| within chart_deviation."""
    e1 = np.zeros(dom.dim)
    e1[0] = 1.0
    if dom.dim == 2:
        tangents = [B[:, 0], -B[:, 0]]
    else:
        ang = 2.0 * np.pi * np.arange(dirs) / dirs
        tangents = [np.cos(a) * B[:, 0] + np.sin(a) * B[:, 1] for a in ang]
    extent = 2.0 * _domain_extent(dom)
    radii = extent * np.geomspace(1e-3, 0.5, steps)
    good = 0.0
    for r in radii:
        worst = 0.0
        for tau in tangents:
            b = _boundary_near(dom, x + r * tau, n_out)
            if b is None:
                worst = np.inf
                break
            z = L @ (b - x) + e1
            worst = max(worst, abs(np.linalg.norm(z) - 1.0))
        if worst <= chart_deviation:
            good = r
        else:
            break
    if good == 0.0:
        raise ValueError("no valid chart radius at the requested deviation")
    return float(good)


def _boundary_near(dom, y, n_out):
    """Boundary point reached from y along the normal direction."""
    f = lambda s: _rho_eval(dom, y + s * n_out)
    lo, hi = -0.5, 0.5
    flo, fhi = f(lo), f(hi)
    tries = 0
    while flo * fhi > 0.0:
        lo *= 2.0
        hi *= 2.0
        flo, fhi = f(lo), f(hi)
        tries += 1
        if tries > 20:
            return None
    s = brentq(f, lo, hi, xtol=1e-14)
    return y + s * n_out


def _rho_eval(dom: ConvexDomain, y: np.ndarray) -> float:
    if dom.kind == "ball":
        return float(y @ y - 1.0)
    if dom.kind == "ellipsoid":
        return float(y @ dom.matrix @ y - 1.0)
    return float(dom.rho(y))


def rho_values(dom: ConvexDomain, pts: np.ndarray) -> np.ndarray:
    """Defining-function values on many points."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if dom.kind == "ball":
        return np.einsum("ij,ij->i", pts, pts) - 1.0
    if dom.kind == "ellipsoid":
        return np.einsum("ij,jk,ik->i", pts, dom.matrix, pts) - 1.0
    return np.asarray(dom.rho(pts))


def _domain_extent(dom: ConvexDomain) -> float:
    if dom.kind == "ball":
        return 1.0
    if dom.kind == "ellipsoid":
        return float(1.0 / np.sqrt(np.linalg.eigvalsh(dom.matrix).min()))
    return max(np.linalg.norm(boundary_point(dom, u))
               for u in np.eye(dom.dim))


# ---------------------------------------------------------------------------
# patch covers and the round-robin collar schedule


@dataclass(eq=False)
class PatchCover:
    """Boundary-centred balls covering the boundary, with certified gap.

    delta lower-bounds the distance, inside the collar of width eta, from
    any patch boundary to the boundary of the union of the others; the
    schedule repetition count divides an escape budget by this gap.
    """

    domain: ConvexDomain
    centers: np.ndarray
    radius: float
    eta: float
    delta: float
    boundary: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    samples_per_patch: int = 512

    @property
    def k(self) -> int:
        return len(self.centers)


def patch_cover(dom: ConvexDomain, patch_radius: float, eta: float,
                boundary_count: int = 2048,
                samples_per_patch: int = 1024) -> PatchCover:
    """Greedy boundary cover by patch balls, then a gap-maximising shrink.

    Patch centres are chosen farthest-point-first among boundary samples
    until every sample is interior to some patch.  The common radius is
    then re-chosen on a grid between the smallest covering radius and the
    requested one to maximise the measured collar gap delta (measured by
    sampled distances between patch boundaries restricted to the collar).
    """
    bnd = boundary_samples(dom, boundary_count)
    inradius = float(np.min(np.linalg.norm(bnd, axis=1)))
    if not (0.0 < eta < 0.25 * inradius):
        raise ValueError("eta must be small relative to the domain inradius")
    centers = [bnd[0]]
    d2 = np.linalg.norm(bnd - bnd[0], axis=1)
    # cover the sampled boundary with strict interior margin
    while d2.max() >= patch_radius * (1.0 - 1e-9):
        i = int(np.argmax(d2))
        centers.append(bnd[i])
        d2 = np.minimum(d2, np.linalg.norm(bnd - bnd[i], axis=1))
        if len(centers) > boundary_count:
            raise CoverageError("patch radius too small to cover the boundary")
    centers = np.asarray(centers)
    covering_need = float(d2.max()) / patch_radius  # fraction of radius used
    best = None
    for f in np.linspace(min(1.0, covering_need + 0.05), 1.0, 16):
        delta = _measure_delta(dom, centers, f * patch_radius, eta,
                               samples_per_patch)
        if delta is not None and (best is None or delta > best[1]):
            best = (f, delta)
    if best is None or best[1] <= 0.0:
        raise CoverageError("no radius in range yields a positive collar gap")
    f, delta = best
    return PatchCover(domain=dom, centers=centers, radius=f * patch_radius,
                      eta=eta, delta=delta, boundary=bnd,
                      samples_per_patch=samples_per_patch)


def measure_delta(cover: PatchCover, sample_factor: int = 1) -> float | None:
    """Re-measure the collar gap at a denser per-patch sampling."""
    return _measure_delta(cover.domain, cover.centers, cover.radius,
                          cover.eta, cover.samples_per_patch * sample_factor)


def _measure_delta(dom, centers, radius, eta, samples) -> float | None:
    """min over patches j of dist(V & dU_j, V & d(union_{i!=j} U_i))."""
    if len(centers) < 2:
        return None
    if dom.dim != 2:
        raise NotImplementedError("patch covers are implemented for d = 2")
    ang = 2.0 * np.pi * np.arange(samples) / samples
    circle = np.column_stack([np.cos(ang), np.sin(ang)])
    rings = [c + radius * circle for c in centers]
    in_collar = []
    for ring in rings:
        inside = rho_values(dom, ring) <= 0.0
        depth = boundary_distance(dom, ring)
        in_collar.append(ring[inside & (depth <= eta)])
    delta = np.inf
    k = len(centers)
    for j in range(k):
        mine = in_collar[j]
        if len(mine) == 0:
            return None
        others = []
        for i in range(k):
            if i == j:
                continue
            ring = in_collar[i]
            if len(ring) == 0:
                continue
            # boundary of the union: points of ring i not strictly inside
            # any other patch (patch j excluded from the union)
            free = np.ones(len(ring), dtype=bool)
            for i2 in range(k):
                if i2 in (i, j):
                    continue
                free &= np.linalg.norm(ring - centers[i2], axis=1) \
                    >= radius * (1.0 - 1e-12)
            others.append(ring[free])
        others = np.vstack([o for o in others if len(o)]) \
            if any(len(o) for o in others) else None
        if others is None or len(others) == 0:
            continue
        dd = cKDTree(others).query(mine, k=1)[0]
        delta = min(delta, float(dd.min()))
    return None if not np.isfinite(delta) else delta


def patch_schedule(cover: PatchCover, M: float) -> list[int]:
    """Round-robin patch sequence: each patch exactly n times, n delta > M."""
    if cover.delta <= 0.0:
        raise ValueError("cover gap delta must be positive")
    n = int(np.floor(M / cover.delta)) + 1
    return list(range(cover.k)) * n


def assemble_patch_labyrinth(dom: ConvexDomain, cover: PatchCover, M: float,
                             t: float = DEFAULT_T, c: float = DEFAULT_C,
                             seed: int = 0, shells_per_step: int = 1,
                             band: tuple[float, float] = (0.88, 0.97),
                             collar_floor: float = 1e-6,
                             deviation_fraction: float = 0.15) -> Labyrinth:
    """Iterate the patch schedule, stacking disc layers in shrinking collars.

    Step j builds a local shell stack inside patch U_(sigma j), placed in
    the osculating chart within the band [band0, band1] * eta_j of current
    collar depth, then maps it back (exactly, segments to segments in the
    plane).  The collar width eta_(j+1) is re-measured as the distance from
    the boundary to everything built so far, and must decrease strictly;
    the loop aborts with :class:`CollarCollapseError` if it falls below
    `collar_floor` before the schedule completes.
    """
    if dom.dim != 2:
        raise NotImplementedError("patch assembly is implemented for d = 2")
    schedule = patch_schedule(cover, M)
    eta = cover.eta
    collar_widths: list[float] = []
    components: list[FlatBall] = []
    alpha, beta = band
    for step, pidx in enumerate(schedule):
        if eta < collar_floor:
            raise CollarCollapseError(
                f"collar width {eta:.3g} fell below {collar_floor} at step "
                f"{step} of {len(schedule)}")
        center = cover.centers[pidx]
        dev = min(0.05, deviation_fraction * alpha * eta)
        osc = osculating_map(dom, center, deviation_bound=dev)
        h = osc.normal_scale * eta
        s_lo, s_hi = 1.0 - beta * h, 1.0 - alpha * h
        js = np.arange(1, shells_per_step + 1)
        radii = s_lo + js * (s_hi - s_lo) / (shells_per_step + 1)
        local = schedule_from_radii(s_lo, radii, 2, t, c)
        window = min(osc.validity_radius * np.linalg.norm(osc.linear, 2),
                     cover.radius * 0.9 * np.linalg.norm(osc.linear, 2))
        built = _local_patch_discs(local, dom.dim, seed + 101 * step, window)
        if not built:
            raise CollarCollapseError(
                f"chart window at step {step} admitted no discs; enlarge the "
                "patch radius or the deviation budget")
        for fb in built:
            mapped = map_flatball_2d(fb, osc.inverse, osc.base - osc.inverse @
                                     np.array([1.0, 0.0]))
            mapped.level = (step + 1, fb.level[1], fb.level[2])
            components.append(mapped)
        pts = np.vstack([_disc_samples_2d(components[i])
                         for i in range(len(components) - len(built),
                                        len(components))])
        eta_new = float(boundary_distance(dom, pts).min())
        if eta_new >= eta:
            raise CollarCollapseError("collar width failed to decrease strictly")
        eta = eta_new
        collar_widths.append(eta)
    return Labyrinth(dim=dom.dim, domain=dom.descriptor(),
                     components=components, schedule=None, seed=seed,
                     kind="patch", collar_widths=collar_widths)


def _local_patch_discs(schedule, dim, seed, window) -> list[FlatBall]:
    """Shell discs restricted to the chart window around e1."""
    e1 = np.zeros(dim)
    e1[0] = 1.0
    out = []
    for j in range(1, schedule.J + 1):
        balls, _ = build_shell(schedule, j, dim, seed=seed)
        for fb in balls:
            if np.linalg.norm(fb.center - e1) + fb.radius <= window:
                out.append(fb)
    return out


def _disc_samples_2d(fb: FlatBall, count: int = 9) -> np.ndarray:
    u = np.array([-fb.normal[1], fb.normal[0]])
    ts = np.linspace(-1.0, 1.0, count)
    return fb.center + np.outer(ts, fb.radius * u)
