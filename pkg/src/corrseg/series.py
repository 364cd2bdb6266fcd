"""Bivariate series container and exact segment moments.

Correlations over arbitrary contiguous index ranges are the basic building
block of the CUSUM machinery.  They are computed from running sums of
(x, y, x^2, y^2, x*y), which makes prefix correlations an O(n) one-pass
operation.  All variances use the population convention (divide by n,
i.e. mean of squares minus squared mean).

Indices into a series are 1-based and inclusive on both ends throughout
the core modules; only the I/O layer translates to 0-based storage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSegmentError


@dataclass(frozen=True)
class SeriesPair:
    """An aligned pair of real-valued series, optionally labelled.

    Parameters
    ----------
    x, y : array-like of float
        Observations, same length T >= 2, all values finite.
    timestamps : tuple of str, optional
        Opaque per-observation labels (e.g. dates), same length as x.
    """

    x: np.ndarray
    y: np.ndarray
    timestamps: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1:
            raise ValueError("x and y must be one-dimensional")
        if len(x) != len(y):
            raise ValueError(f"x and y lengths differ: {len(x)} vs {len(y)}")
        if len(x) < 2:
            raise ValueError("need at least 2 observations")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("all values must be finite")
        if self.timestamps is not None:
            ts = tuple(str(t) for t in self.timestamps)
            if len(ts) != len(x):
                raise ValueError("timestamps length must match series length")
            object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def T(self) -> int:
        return len(self.x)

    def swapped(self) -> "SeriesPair":
        """The same pair with the roles of the two series exchanged."""
        return SeriesPair(self.y, self.x, self.timestamps)


@dataclass(frozen=True)
class SegmentMoments:
    """Sufficient statistics of a contiguous segment.

    Two adjacent segments can be merged by adding their sums; the result
    equals the moments of the union up to floating rounding.
    """

    n: int
    sum_x: float
    sum_y: float
    sum_xx: float
    sum_yy: float
    sum_xy: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("segment must contain at least one observation")

    def merge(self, other: "SegmentMoments") -> "SegmentMoments":
        """Moments of the concatenation of two (adjacent) segments."""
        return SegmentMoments(
            n=self.n + other.n,
            sum_x=self.sum_x + other.sum_x,
            sum_y=self.sum_y + other.sum_y,
            sum_xx=self.sum_xx + other.sum_xx,
            sum_yy=self.sum_yy + other.sum_yy,
            sum_xy=self.sum_xy + other.sum_xy,
        )

    @property
    def mean_x(self) -> float:
        return self.sum_x / self.n

    @property
    def mean_y(self) -> float:
        return self.sum_y / self.n

    @property
    def var_x(self) -> float:
        """Population variance of x: mean of squares minus squared mean."""
        return self.sum_xx / self.n - self.mean_x**2

    @property
    def var_y(self) -> float:
        return self.sum_yy / self.n - self.mean_y**2

    @property
    def cov_xy(self) -> float:
        return self.sum_xy / self.n - self.mean_x * self.mean_y


def accumulate(pair: SeriesPair, a: int, b: int) -> SegmentMoments:
    """Exact sums of (x, y, x^2, y^2, x*y) over observations a..b inclusive.

    Parameters
    ----------
    pair : SeriesPair
    a, b : int
        1-based inclusive segment bounds, 1 <= a <= b <= T.

    Raises
    ------
    IndexError
        If the bounds fall outside the series.
    """
    if not (1 <= a <= b <= pair.T):
        raise IndexError(f"segment [{a}, {b}] out of range for T={pair.T}")
    x = pair.x[a - 1 : b]
    y = pair.y[a - 1 : b]
    return SegmentMoments(
        n=b - a + 1,
        sum_x=float(np.sum(x)),
        sum_y=float(np.sum(y)),
        sum_xx=float(np.sum(x * x)),
        sum_yy=float(np.sum(y * y)),
        sum_xy=float(np.sum(x * y)),
    )


def pearson(m: SegmentMoments) -> float:
    """Bravais-Pearson correlation coefficient from segment moments.

    Raises
    ------
    DegenerateSegmentError
        If the segment has fewer than 2 points or zero variance in either
        series; such segments must not be tested.
    """
    if m.n < 2:
        raise DegenerateSegmentError("correlation needs at least 2 observations")
    vx, vy = m.var_x, m.var_y
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateSegmentError("zero variance in segment")
    return float(m.cov_xy / np.sqrt(vx * vy))


def prefix_correlations(pair: SeriesPair, a: int, b: int) -> np.ndarray:
    """Correlations of all prefixes [a, e] for e = a..b, in one pass.

    Returns an array of length b - a + 1 whose entry j is the correlation
    of observations a..a+j.  Entries with fewer than 2 observations or
    with zero variance in either series are NaN.
    """
    if not (1 <= a <= b <= pair.T):
        raise IndexError(f"segment [{a}, {b}] out of range for T={pair.T}")
    x = pair.x[a - 1 : b]
    y = pair.y[a - 1 : b]
    n = np.arange(1, b - a + 2, dtype=np.float64)
    mx = np.cumsum(x) / n
    my = np.cumsum(y) / n
    vx = np.cumsum(x * x) / n - mx * mx
    vy = np.cumsum(y * y) / n - my * my
    cxy = np.cumsum(x * y) / n - mx * my
    out = np.full(len(x), np.nan)
    ok = (vx > 0.0) & (vy > 0.0)
    ok[0] = False
    out[ok] = cxy[ok] / np.sqrt(vx[ok] * vy[ok])
    return out
