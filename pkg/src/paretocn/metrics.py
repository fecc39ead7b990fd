"""Coverage-set quality metrics and buffer-ranking scores.

Two families live here. The reporting metrics (hypervolume, additive
epsilon indicator) measure how well a proposed coverage set matches a
reference front. The ranking scores (crowding distance, L2 score,
dominating score) order stored episode returns so the experience buffer can
prune the least useful trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pareto import non_dominated, safe_spans
from .validation import check_point_set, check_return_vector

# Score handed to boundary points of a crowding computation: extremes of the
# front must never look crowded, whatever the threshold.
BOUNDARY_SCORE = float(np.finfo(np.float64).max)

# Crowding level at or below which a point counts as crowded and its L2
# score is replaced by the penalized variant.
CROWD_THRESHOLD = 0.2


@dataclass(frozen=True)
class MetricReport:
    """Summary of one coverage-set evaluation."""

    hypervolume: float
    eps_max: float
    eps_mean: float

    def __post_init__(self):
        if self.hypervolume < 0:
            raise ValueError(f"hypervolume must be >= 0, got {self.hypervolume}")
        if self.eps_max < 0:
            raise ValueError(f"eps_max must be >= 0, got {self.eps_max}")
        if self.eps_mean > self.eps_max + 1e-12:
            raise ValueError(
                f"eps_mean {self.eps_mean} exceeds eps_max {self.eps_max}"
            )

    def as_dict(self) -> dict:
        return {
            "hypervolume": self.hypervolume,
            "eps_max": self.eps_max,
            "eps_mean": self.eps_mean,
        }


def hypervolume(points, reference) -> float:
    """Exact measure of the region dominated by ``points`` above ``reference``.

    Computed by a recursive dimension sweep: slice the set along the last
    objective and accumulate slab thickness times the (n-1)-dimensional
    volume of the points present in each slab, down to a sorted-sweep base
    case in two dimensions. Points that do not strictly exceed the reference
    in every objective contribute nothing; dominated and duplicate points
    are discarded before recursion, so they never change the result.
    """
    ref = check_return_vector(reference, "reference")
    n = ref.shape[0]
    if n < 2:
        raise ValueError("hypervolume requires at least 2 objectives")
    pts = check_point_set(points, "points", dim=n)
    if pts.shape[0] == 0:
        return 0.0
    shifted = pts - ref
    shifted = shifted[np.all(shifted > 0.0, axis=1)]
    return _hv_canonical(shifted)


def _hv_canonical(pts: np.ndarray) -> float:
    """Volume above the origin of an all-positive point array."""
    if pts.shape[0] == 0:
        return 0.0
    pts = np.unique(pts, axis=0)
    if pts.shape[0] > 1:
        pts = pts[non_dominated(pts)]
    return _hv_cached(pts.shape[1], pts.tobytes())


@lru_cache(maxsize=65536)
def _hv_cached(n: int, data: bytes) -> float:
    pts = np.frombuffer(data, dtype=np.float64).reshape(-1, n)
    if n == 1:
        return float(pts.max())
    if n == 2:
        # Unique non-dominated rows sorted lexicographically: strictly
        # ascending first objective, strictly descending second.
        xs = pts[:, 0]
        ys = pts[:, 1]
        below = np.append(ys[1:], 0.0)
        return float(np.sum(xs * (ys - below)))
    order = np.argsort(-pts[:, -1], kind="stable")
    sliced = pts[order]
    z = sliced[:, -1]
    lower = np.append(z[1:], 0.0)
    total = 0.0
    for k in range(len(z)):
        thickness = z[k] - lower[k]
        if thickness > 0.0:
            total += thickness * _hv_canonical(sliced[: k + 1, :-1])
    return total


def epsilon_metrics(front, coverage):
    """Additive one-sided epsilon gaps from ``front`` to ``coverage``.

    For each front point p the gap is ``min_q max_i max(0, p_i - q_i)``:
    the smallest amount some coverage point falls short of p, with surplus
    in any objective costing nothing. Returns (eps_max, eps_mean,
    per-point gaps aligned with the front rows).
    """
    f = check_point_set(front, "front")
    if f.shape[0] == 0:
        raise ValueError("front must be non-empty")
    c = check_point_set(coverage, "coverage", dim=f.shape[1])
    if c.shape[0] == 0:
        raise ValueError("coverage must be non-empty")
    gaps = np.maximum(f[:, None, :] - c[None, :, :], 0.0).max(axis=2).min(axis=1)
    return float(gaps.max()), float(gaps.mean()), gaps


def front_normalized_epsilon(front, coverage):
    """Epsilon metrics on the scale set by the front's per-objective extent.

    Both sets are mapped so the front spans [0, 1] in every objective
    before the gaps are measured; an objective on which the front is
    constant passes through unscaled. This makes gap values comparable
    across environments with very different reward magnitudes.
    """
    f = check_point_set(front, "front")
    if f.shape[0] == 0:
        raise ValueError("front must be non-empty")
    c = check_point_set(coverage, "coverage", dim=f.shape[1])
    lo = f.min(axis=0)
    spans = safe_spans(f)
    return epsilon_metrics((f - lo) / spans, (c - lo) / spans)


def crowding_distance(points) -> np.ndarray:
    """Per-point density score, higher meaning more isolated.

    Objectives are normalized by the set's own min/max (a constant
    objective contributes nothing). Each interior point accumulates, per
    objective, the normalized gap between its sorted neighbors. Points
    first or last in any objective's sort get :data:`BOUNDARY_SCORE`.
    Exact duplicate rows score 0 regardless: zero distance between copies
    means maximally crowded, and boundary status never rescues a duplicate.
    """
    pts = check_point_set(points)
    m, n = pts.shape
    if m == 0:
        raise ValueError("points must be non-empty")
    if m == 1:
        return np.full(1, BOUNDARY_SCORE)
    _, inverse, counts = np.unique(pts, axis=0, return_inverse=True, return_counts=True)
    duplicated = counts[inverse] > 1
    scores = np.zeros(m)
    boundary = np.zeros(m, dtype=bool)
    mins = pts.min(axis=0)
    spans = pts.max(axis=0) - mins
    for d in range(n):
        if spans[d] == 0.0:
            continue
        vals = (pts[:, d] - mins[d]) / spans[d]
        order = np.argsort(vals, kind="stable")
        boundary[order[0]] = True
        boundary[order[-1]] = True
        interior = order[1:-1]
        scores[interior] += vals[order[2:]] - vals[order[:-2]]
    scores[boundary] = BOUNDARY_SCORE
    scores[duplicated] = 0.0
    return scores


def dominating_score(points, coverage_mask=None, c: float = 0.01) -> np.ndarray:
    """Pruning rank for each point: higher means more worth keeping.

    The base score is the negated Euclidean distance to the nearest
    non-dominated point (0 for non-dominated points themselves). Points
    whose crowding distance is at or below :data:`CROWD_THRESHOLD` are
    penalized to ``2 * (base - c)`` instead, which pushes duplicates below
    every distinct non-dominated point. Crowding is computed on the
    non-dominated subset only; every point inherits the crowding of its
    nearest non-dominated neighbor.
    """
    pts = check_point_set(points)
    m = pts.shape[0]
    if m == 0:
        raise ValueError("points must be non-empty")
    if c <= 0:
        raise ValueError(f"c must be > 0, got {c}")
    if coverage_mask is None:
        coverage_mask = non_dominated(pts)
    else:
        coverage_mask = np.asarray(coverage_mask, dtype=bool)
        if coverage_mask.shape != (m,):
            raise ValueError("coverage_mask must align with points")
    nd = pts[coverage_mask]
    dists = np.linalg.norm(pts[:, None, :] - nd[None, :, :], axis=2)
    nearest = dists.argmin(axis=1)
    l2 = -dists.min(axis=1)
    crowding = crowding_distance(nd)[nearest]
    return np.where(crowding > CROWD_THRESHOLD, l2, 2.0 * (l2 - c))
