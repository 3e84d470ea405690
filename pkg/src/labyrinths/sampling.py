"""Deterministic point generators on unit spheres.

Candidate sets are antipodally symmetric (built as +/- of a half set) so
that exact antipodes exist, and the d=2 grid size is a power of two so that
farthest-point passes refine the circle dyadically.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

GOLDEN_FRAC = (np.sqrt(5.0) - 1.0) / 2.0


def sphere_candidates(d: int, count: int) -> np.ndarray:
    """Quasi-uniform candidate set of roughly `count` points on S^(d-1).

    The returned set is exactly symmetric under x -> -x.  For d = 2 the
    actual size is the next power of two >= max(count, 8).
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    count = max(int(count), 8)
    if d == 2:
        n = 1 << int(np.ceil(np.log2(count)))
        theta = 2.0 * np.pi * np.arange(n // 2) / n
        half = np.column_stack([np.cos(theta), np.sin(theta)])
    elif d == 3:
        k = (count + 1) // 2
        i = np.arange(k)
        z = (i + 0.5) / k  # upper hemisphere heights
        phi = 2.0 * np.pi * np.mod(i * GOLDEN_FRAC, 1.0)
        rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        half = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        k = (count + 1) // 2
        sob = qmc.Sobol(d, scramble=False)
        sob.fast_forward(1)  # skip the all-zero point
        u = sob.random(2 * k)
        g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
        norms = np.linalg.norm(g, axis=1)
        keep = norms > 1e-9
        g = g[keep][:k]
        half = g / np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([half, -half])


def sphere_samples(d: int, n: int, seed: int = 0) -> np.ndarray:
    """n quasi-uniform test samples on S^(d-1) (scrambled Sobol, seeded)."""
    if d == 2:
        rng = np.random.default_rng(seed)
        theta = 2.0 * np.pi * (np.arange(n) + rng.random()) / n
        return np.column_stack([np.cos(theta), np.sin(theta)])
    sob = qmc.Sobol(d, scramble=True, seed=seed)
    draw = 1 << int(np.ceil(np.log2(int(n * 1.05) + 8)))
    u = sob.random(draw)
    g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    g = g[norms > 1e-9][:n]
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def farthest_point_order(
    points: np.ndarray,
    start: int = 0,
    stop_dist: float | None = None,
    stop_count: int | None = None,
) -> np.ndarray:
    """Indices of a farthest-point traversal of `points`.

    Selection stops once the farthest remaining point is closer than
    `stop_dist` to the selected set, or once `stop_count` points are chosen.
    Ties are broken by the smallest candidate index, so the output is a
    deterministic function of the inputs.
    """
    n = len(points)
    if n == 0:
        return np.empty(0, dtype=np.intp)
    start = int(start) % n
    chosen = [start]
    d2 = np.einsum("ij,ij->i", points - points[start], points - points[start])
    limit = n if stop_count is None else min(stop_count, n)
    thresh2 = None if stop_dist is None else float(stop_dist) ** 2
    while len(chosen) < limit:
        i = int(np.argmax(d2))
        if thresh2 is not None and d2[i] < thresh2:
            break
        chosen.append(i)
        diff = points - points[i]
        np.minimum(d2, np.einsum("ij,ij->i", diff, diff), out=d2)
    return np.asarray(chosen, dtype=np.intp)
