import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretocn.pareto import (
    dominates,
    non_dominated,
    normalize,
    pareto_filter,
    read_points_csv,
    write_points_csv,
)


def brute_force_mask(points):
    """Independent O(m^2) filter using plain Python comparisons."""
    pts = [list(map(float, p)) for p in points]
    m = len(pts)
    mask = []
    for i in range(m):
        dominated = False
        for j in range(m):
            if i == j:
                continue
            ge = all(a >= b for a, b in zip(pts[j], pts[i]))
            gt = any(a > b for a, b in zip(pts[j], pts[i]))
            if ge and gt:
                dominated = True
                break
        mask.append(not dominated)
    return np.array(mask)


finite_floats = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False)


def vectors(dim):
    return st.lists(finite_floats, min_size=dim, max_size=dim)


class TestDominates:
    def test_strict_improvement_both(self):
        assert dominates((2, 2), (1, 1))

    def test_incomparable_pair(self):
        assert not dominates((0, 10), (5, 5))
        assert not dominates((5, 5), (0, 10))

    def test_equal_vectors(self):
        assert not dominates((3, 3), (3, 3))

    def test_weak_improvement_one_component(self):
        assert dominates((1, 2), (1, 1))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dominates((1, 2), (1, 2, 3))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            dominates((np.nan, 0), (0, 0))

    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(vectors(n), vectors(n))))
    def test_antisymmetry(self, pair):
        a, b = pair
        if dominates(a, b):
            assert not dominates(b, a)

    @given(st.integers(1, 5).flatmap(vectors))
    def test_irreflexivity(self, a):
        assert not dominates(a, a)


class TestNonDominated:
    def test_scatter_example(self):
        pts = [(1, 4), (2, 2), (4, 1), (0.5, 3), (0.75, 2.3), (2.3, 1), (3.3, 0.7)]
        mask = non_dominated(pts)
        assert list(np.flatnonzero(mask)) == [0, 1, 2]

    def test_singleton(self):
        assert non_dominated([(5, 5)]).tolist() == [True]

    def test_duplicates_all_survive(self):
        assert non_dominated([(1, 1), (1, 1)]).tolist() == [True, True]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            non_dominated(np.empty((0, 2)))

    def test_filter_keeps_order_and_duplicates(self):
        pts = [(0, 0), (1, 1), (1, 1), (2, 0)]
        kept = pareto_filter(pts)
        assert kept.tolist() == [[1, 1], [1, 1], [2, 0]]

    @given(
        st.integers(2, 4).flatmap(
            lambda n: st.lists(vectors(n), min_size=1, max_size=40)
        )
    )
    @settings(max_examples=200)
    def test_matches_brute_force(self, pts):
        assert np.array_equal(non_dominated(pts), brute_force_mask(pts))

    @given(
        st.integers(2, 3).flatmap(
            lambda n: st.tuples(
                st.lists(
                    st.lists(st.integers(-50, 50), min_size=n, max_size=n),
                    min_size=1,
                    max_size=25,
                ),
                st.lists(
                    st.tuples(st.integers(1, 9), st.integers(-20, 20)),
                    min_size=n,
                    max_size=n,
                ),
            )
        )
    )
    @settings(max_examples=100)
    def test_invariant_under_increasing_affine_maps(self, args):
        # Integer coordinates and coefficients keep the map exactly
        # strictly increasing; float rounding could otherwise merge
        # distinct values and change the dominance relation.
        pts, coeffs = args
        arr = np.asarray(pts, dtype=float)
        slopes = np.array([c[0] for c in coeffs], dtype=float)
        offsets = np.array([c[1] for c in coeffs], dtype=float)
        mapped = arr * slopes + offsets
        assert np.array_equal(non_dominated(arr), non_dominated(mapped))


class TestNormalize:
    LO = (1.0, -19.0)
    HI = (124.0, -1.0)

    def test_extremes(self):
        out = normalize([(124, -19)], self.LO, self.HI)
        assert out.tolist() == [[1.0, 0.0]]
        out = normalize([(1, -1)], self.LO, self.HI)
        assert out.tolist() == [[0.0, 1.0]]

    def test_midpoint(self):
        out = normalize([(62.5, -10)], self.LO, self.HI)
        assert out[0] == pytest.approx([0.5, 0.5])

    def test_out_of_box_allowed(self):
        out = normalize([(0, 0)], (1, -1), (2, 1))
        assert out[0][0] == -1.0

    def test_degenerate_bounds_rejected(self):
        with pytest.raises(ValueError):
            normalize([(0, 0)], (0, 0), (1, 0))


class TestCsvRoundTrip:
    def test_round_trip_exact(self, tmp_path):
        pts = np.array([[1.0, -1.0], [0.1 + 0.2, -19.0], [124.0, -1e-17]])
        path = tmp_path / "points.csv"
        write_points_csv(path, pts)
        back = read_points_csv(path)
        assert np.array_equal(back, pts)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "points.csv"
        write_points_csv(path, [(1, 2, 3)])
        assert path.read_text().splitlines()[0] == "o0,o1,o2"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError):
            read_points_csv(path)

    def test_deterministic_bytes(self, tmp_path):
        pts = [(1 / 3, -2 / 7), (0.1, 0.3)]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_points_csv(a, pts)
        write_points_csv(b, pts)
        assert a.read_bytes() == b.read_bytes()
