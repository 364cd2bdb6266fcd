import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrseg import (
    DegenerateSegmentError,
    SegmentMoments,
    SeriesPair,
    accumulate,
    pearson,
    prefix_correlations,
)
from conftest import correlated_pair


class TestAccumulate:
    def test_identity_series(self):
        pair = SeriesPair([1, 2, 3], [1, 2, 3])
        m = accumulate(pair, 1, 3)
        assert m.n == 3
        assert m.sum_x == 6 and m.sum_y == 6
        assert m.sum_xx == 14 and m.sum_yy == 14
        assert m.sum_xy == 14

    def test_single_observation(self):
        pair = SeriesPair([2.5, -1.0], [4.0, 0.5])
        m = accumulate(pair, 1, 1)
        assert m.n == 1
        assert m.sum_x == 2.5 and m.sum_y == 4.0
        assert m.sum_xx == 6.25 and m.sum_yy == 16.0
        assert m.sum_xy == 10.0

    def test_against_naive_loop(self, rng):
        x = rng.normal(size=7)
        y = rng.normal(size=7)
        pair = SeriesPair(x, y)
        m = accumulate(pair, 2, 6)
        sums = [0.0] * 5
        for t in range(1, 6):  # 0-based indices for 1-based [2, 6]
            sums[0] += x[t]
            sums[1] += y[t]
            sums[2] += x[t] ** 2
            sums[3] += y[t] ** 2
            sums[4] += x[t] * y[t]
        assert m.n == 5
        for got, want in zip((m.sum_x, m.sum_y, m.sum_xx, m.sum_yy, m.sum_xy), sums):
            assert got == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0, 3), (1, 4), (3, 2), (-1, 2)])
    def test_out_of_range(self, a, b):
        pair = SeriesPair([1.0, 2.0, 3.0], [3.0, 1.0, 2.0])
        with pytest.raises(IndexError):
            accumulate(pair, a, b)


class TestPearson:
    def test_perfectly_correlated(self):
        m = accumulate(SeriesPair([1, 2, 3], [1, 2, 3]), 1, 3)
        assert pearson(m) == pytest.approx(1.0, abs=1e-12)

    def test_perfectly_anticorrelated(self):
        m = accumulate(SeriesPair([1, 2, 3], [3, 2, 1]), 1, 3)
        assert pearson(m) == pytest.approx(-1.0, abs=1e-12)

    def test_sampling_accuracy(self, rng):
        pair = correlated_pair(0.5, 1000, rng)
        rho = pearson(accumulate(pair, 1, 1000))
        assert abs(rho - 0.5) < 0.1

    def test_single_point_rejected(self):
        with pytest.raises(DegenerateSegmentError):
            pearson(SegmentMoments(n=1, sum_x=1, sum_y=1, sum_xx=1, sum_yy=1, sum_xy=1))

    def test_zero_variance_rejected(self):
        m = accumulate(SeriesPair([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]), 1, 3)
        with pytest.raises(DegenerateSegmentError):
            pearson(m)


@st.composite
def nondegenerate_pair(draw):
    # Bounded values with a variance floor: raw-moment arithmetic carries a
    # relative error of order eps * mean(v^2) / var(v), so the documented
    # 1e-12 tolerance needs well-conditioned data.
    n = draw(st.integers(min_value=3, max_value=40))
    vals = st.floats(min_value=-8, max_value=8, allow_nan=False)
    x = np.asarray(draw(st.lists(vals, min_size=n, max_size=n)), dtype=float)
    y = np.asarray(draw(st.lists(vals, min_size=n, max_size=n)), dtype=float)
    if np.var(x) < 1.0:
        x = 1.5 * np.arange(n, dtype=float)
    if np.var(y) < 1.0:
        y = np.arange(n, dtype=float) ** 2 / max(1.0, n / 3.0) - 2.0 * np.arange(n)
    return x, y


class TestPearsonProperties:
    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(nondegenerate_pair(),
           st.floats(min_value=0.5, max_value=3),
           st.floats(min_value=-10, max_value=10),
           st.floats(min_value=0.5, max_value=3),
           st.floats(min_value=-10, max_value=10))
    def test_affine_invariance(self, xy, a, b, c, d):
        x, y = xy
        base = pearson(accumulate(SeriesPair(x, y), 1, len(x)))
        moved = pearson(accumulate(SeriesPair(a * x + b, c * y + d), 1, len(x)))
        assert moved == pytest.approx(base, rel=1e-12, abs=1e-12)
        flipped = pearson(accumulate(SeriesPair(-a * x + b, c * y + d), 1, len(x)))
        assert flipped == pytest.approx(-base, rel=1e-12, abs=1e-12)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(nondegenerate_pair())
    def test_bounded_by_one(self, xy):
        x, y = xy
        rho = pearson(accumulate(SeriesPair(x, y), 1, len(x)))
        assert abs(rho) <= 1.0 + 1e-12

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(nondegenerate_pair(), st.integers(min_value=1, max_value=38))
    def test_merge_matches_union(self, xy, cut):
        x, y = xy
        n = len(x)
        cut = min(cut, n - 1)
        pair = SeriesPair(x, y)
        left = accumulate(pair, 1, cut)
        right = accumulate(pair, cut + 1, n)
        merged = left.merge(right)
        whole = accumulate(pair, 1, n)
        for attr in ("n", "sum_x", "sum_y", "sum_xx", "sum_yy", "sum_xy"):
            assert getattr(merged, attr) == pytest.approx(getattr(whole, attr), rel=1e-10, abs=1e-10)
        assert pearson(merged) == pytest.approx(pearson(whole), rel=1e-10)


class TestPrefixCorrelations:
    def test_matches_pointwise_recomputation(self, rng):
        x = rng.normal(size=60)
        y = 0.4 * x + rng.normal(size=60)
        pair = SeriesPair(x, y)
        rho = prefix_correlations(pair, 5, 50)
        assert math.isnan(rho[0])
        for e in range(6, 51):
            want = pearson(accumulate(pair, 5, e))
            assert rho[e - 5] == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_constant_prefix_is_nan(self):
        x = np.array([1.0, 1.0, 1.0, 2.0, 3.0, 1.5, 0.5, 2.5])
        y = np.arange(8.0)
        rho = prefix_correlations(SeriesPair(x, y), 1, 8)
        assert np.isnan(rho[:3]).all()
        assert np.isfinite(rho[3:]).all()
