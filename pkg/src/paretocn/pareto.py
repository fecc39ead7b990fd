"""Pareto dominance primitives and point-set utilities.

Throughout the package every objective is maximized, so a point is better
when it is larger componentwise. Costs (time, steps) are represented as
negative rewards before they reach any of these functions.
"""

from __future__ import annotations

import csv

import numpy as np

from .validation import check_point_set, check_return_vector


def dominates(a, b) -> bool:
    """True iff ``a`` Pareto-dominates ``b``.

    ``a`` dominates ``b`` when it is at least as large in every objective and
    strictly larger in at least one. Comparisons are exact; equal vectors do
    not dominate each other.
    """
    a = check_return_vector(a, "a")
    b = check_return_vector(b, "b", dim=a.shape[0])
    return bool(np.all(a >= b) and np.any(a > b))


def non_dominated(points) -> np.ndarray:
    """Boolean mask of the rows of ``points`` not dominated by any other row.

    Duplicate rows are all retained: equal vectors never dominate each other,
    so each copy of a non-dominated point keeps a True entry.
    """
    pts = check_point_set(points)
    m = pts.shape[0]
    if m == 0:
        raise ValueError("points must be non-empty")
    if m <= 1024:
        # One broadcast pass; [i, j] compares candidate dominator j to i.
        ge = np.all(pts[None, :, :] >= pts[:, None, :], axis=2)
        gt = np.any(pts[None, :, :] > pts[:, None, :], axis=2)
        return ~np.any(ge & gt, axis=1)
    mask = np.ones(m, dtype=bool)
    for i in range(m):
        ge = np.all(pts >= pts[i], axis=1)
        gt = np.any(pts > pts[i], axis=1)
        if np.any(ge & gt):
            mask[i] = False
    return mask


def pareto_filter(points) -> np.ndarray:
    """Rows of ``points`` that survive :func:`non_dominated`, original order."""
    pts = check_point_set(points)
    return pts[non_dominated(pts)]


def normalize(points, lo, hi) -> np.ndarray:
    """Map ``points`` affinely so that ``lo`` goes to 0 and ``hi`` to 1 per dimension.

    ``hi`` must be strictly greater than ``lo`` in every dimension. Points
    outside the box are allowed and land outside [0, 1].
    """
    lo = check_return_vector(lo, "lo")
    hi = check_return_vector(hi, "hi", dim=lo.shape[0])
    pts = check_point_set(points, dim=lo.shape[0])
    if not np.all(hi > lo):
        raise ValueError(f"hi must exceed lo in every dimension, got lo={lo!r} hi={hi!r}")
    return (pts - lo) / (hi - lo)


def safe_spans(points) -> np.ndarray:
    """Per-dimension extent of ``points`` with zero spans replaced by 1.

    Used when normalizing by the spread of a reference set: a dimension in
    which every point agrees carries no information, and dividing by 1 leaves
    the (zero) differences unchanged instead of producing NaN.
    """
    pts = check_point_set(points)
    if pts.shape[0] == 0:
        raise ValueError("points must be non-empty")
    spans = pts.max(axis=0) - pts.min(axis=0)
    spans[spans == 0.0] = 1.0
    return spans


def write_points_csv(path, points) -> None:
    """Write one point per row with header ``o0,o1,...``.

    Floats are rendered with ``repr`` so the file round-trips exactly and the
    bytes are stable across runs.
    """
    pts = check_point_set(points)
    n = pts.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"o{i}" for i in range(n)])
        for row in pts:
            writer.writerow([repr(float(v)) for v in row])


def read_points_csv(path) -> np.ndarray:
    """Read a point set written by :func:`write_points_csv`.

    Malformed content raises ValueError naming the offending row.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected an o0,o1,... header")
        if header != [f"o{i}" for i in range(len(header))]:
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: row {lineno} has {len(row)} values, expected {len(header)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}: row {lineno} is not numeric: {row!r}")
    if not rows:
        return np.empty((0, len(header)))
    return check_point_set(rows, "points", dim=len(header))
