"""Scatter plots of coverage sets, written as reproducible SVG files.

Figures overlay any number of labeled coverage sets on an optional true
front. Two and three objectives get a single scatter; above three the
figure becomes a grid with one panel per objective pair. Output is kept
byte-stable for a fixed input: the SVG hash salt is pinned and no
timestamp metadata is embedded.
"""

from __future__ import annotations

import itertools
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .validation import check_point_set

_HASH_SALT = "paretocn"
# front first so it sits under the coverage markers
_FRONT_STYLE = dict(marker="+", color="black", s=70, linewidths=1.2)
_COVERAGE_MARKERS = ("o", "x", "^", "s", "D", "v", "*", "P")
_COVERAGE_COLORS = (
    "tab:blue", "tab:red", "tab:green", "tab:orange",
    "tab:purple", "tab:brown", "tab:pink", "tab:olive",
)


def _series_style(index):
    return dict(
        marker=_COVERAGE_MARKERS[index % len(_COVERAGE_MARKERS)],
        color=_COVERAGE_COLORS[index % len(_COVERAGE_COLORS)],
        s=35,
        alpha=0.85,
    )


def _scatter(ax, points, dims, **style):
    coords = [points[:, d] for d in dims]
    ax.scatter(*coords, **style)


def scatter_plot(out_path, coverages, front=None):
    """Write an SVG comparing coverage sets, one marker series per set.

    ``coverages`` maps a legend label to a point set; all sets and the
    optional ``front`` must share one dimensionality of at least 2.
    Returns the number of objectives plotted.
    """
    if not coverages:
        raise ValueError("at least one coverage set is required")
    named = {
        label: check_point_set(pts, f"coverage {label!r}")
        for label, pts in coverages.items()
    }
    dims = {pts.shape[1] for pts in named.values()}
    if front is not None:
        front = check_point_set(front, "front")
        dims.add(front.shape[1])
    if len(dims) != 1:
        raise ValueError(f"point sets disagree on dimension: {sorted(dims)}")
    (n,) = dims
    if n < 2:
        raise ValueError(f"need at least 2 objectives to plot, got {n}")

    with plt.rc_context({"svg.hashsalt": _HASH_SALT}):
        if n == 2:
            fig, ax = plt.subplots(figsize=(6.0, 4.5))
            _draw_panel(ax, named, front, (0, 1))
            ax.legend(loc="best", fontsize=9)
        elif n == 3:
            fig = plt.figure(figsize=(6.5, 5.0))
            ax = fig.add_subplot(projection="3d")
            _draw_panel(ax, named, front, (0, 1, 2))
            ax.set_zlabel("objective 2")
            ax.legend(loc="upper left", fontsize=9)
        else:
            pairs = list(itertools.combinations(range(n), 2))
            cols = 3
            rows = math.ceil(len(pairs) / cols)
            fig, axes = plt.subplots(
                rows, cols, figsize=(3.6 * cols, 3.0 * rows), squeeze=False
            )
            flat = axes.ravel()
            for ax, pair in zip(flat, pairs):
                _draw_panel(ax, named, front, pair)
            for ax in flat[len(pairs):]:
                ax.set_visible(False)
            flat[0].legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return n


def _draw_panel(ax, named, front, dims):
    if front is not None:
        _scatter(ax, front, dims, label="true front", **_FRONT_STYLE)
    for index, (label, pts) in enumerate(named.items()):
        _scatter(ax, pts, dims, label=label, **_series_style(index))
    ax.set_xlabel(f"objective {dims[0]}")
    ax.set_ylabel(f"objective {dims[1]}")
