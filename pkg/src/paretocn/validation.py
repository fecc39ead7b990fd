"""Input validation helpers shared across the package.

All public entry points funnel array-likes through these checks so that
dimension mismatches and non-finite values fail early with a usable message
instead of propagating NaNs through the numerics.
"""

from __future__ import annotations

import numbers

import numpy as np


def check_return_vector(value, name: str = "vector", dim: int | None = None) -> np.ndarray:
    """Coerce ``value`` to a finite 1-D float64 array.

    Parameters
    ----------
    value : array-like
        Sequence of per-objective values.
    name : str
        Label used in error messages.
    dim : int, optional
        Required length; checked when given.
    """
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} must have at least one component")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries: {arr!r}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    return arr


def check_point_set(points, name: str = "points", dim: int | None = None) -> np.ndarray:
    """Coerce ``points`` to a finite 2-D float64 array of shape (m, n).

    An empty input is allowed and yields shape (0, dim or 0); callers that
    forbid empty sets check the row count themselves.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, dim if dim is not None else 0)
    if arr.ndim == 1:
        # A flat sequence is ambiguous; require explicit 2-D input.
        raise ValueError(f"{name} must be 2-D (one row per point), got shape {arr.shape}")
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if dim is not None and arr.shape[0] > 0 and arr.shape[1] != dim:
        raise ValueError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    return arr


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def check_rng(rng) -> np.random.Generator:
    """Return a ``numpy.random.Generator``, seeding a fresh one if needed."""
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    if isinstance(rng, np.random.Generator):
        return rng
    raise ValueError(f"rng must be None, an int seed or a Generator, got {type(rng)!r}")
