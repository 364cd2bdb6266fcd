"""CUSUM target function, test statistic, and break location estimator.

On a sub-interval [l1, l2] of the unit time scale, the target function at
fraction z is the scaled difference between the correlation of the prefix
ending at z and the correlation of the whole sub-sample:

    scale * (prefix_len / segment_len) * (corr(prefix) - corr(segment))

where ``scale`` is the long-run variance normalizer computed on the same
sub-sample.  The test statistic is sqrt(segment_len) times the maximum of
the absolute target function over the grid of multiples of 1/T, and the
break location estimate is the data index of the (smallest) maximizer.

Fractions are mapped to data indices by clamped flooring: index(z) =
min(max(floor(z*T), 1), T-1).  Prefixes start two observations into the
segment, where sample correlations first exist.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import SegmentTooShortError
from .lrv import DEFAULT_MIN_SEGMENT, HacConfig, lrv_components
from .series import SeriesPair, prefix_correlations

logger = logging.getLogger(__name__)

# Guard against floor(z*T) landing one ulp below an exact grid multiple.
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class Interval:
    """A sub-interval [l1, l2] of the unit time scale, 0 <= l1 < l2 <= 1."""

    l1: float
    l2: float

    def __post_init__(self):
        if not (0.0 <= self.l1 < self.l2 <= 1.0):
            raise ValueError(f"need 0 <= l1 < l2 <= 1, got [{self.l1}, {self.l2}]")


def frac_to_index(z: float, T: int) -> int:
    """Clamped 1-based data index for a fraction: min(max(floor(z*T), 1), T-1)."""
    return min(max(math.floor(z * T + _GRID_EPS), 1), T - 1)


def prefix_end(z: float, l1: float, T: int) -> int:
    """Index where the prefix for fraction z ends, at least two points in.

    Equals frac_to_index(z, T) unless that would leave fewer than two
    observations in the prefix, in which case the second segment index is
    returned.
    """
    return max(frac_to_index(z, T), frac_to_index(l1, T) + 1)


@dataclass(frozen=True)
class CusumProfile:
    """Sampled absolute target function on a sub-interval.

    Attributes
    ----------
    interval : Interval
        The fraction interval the profile was computed on.
    start, end : int
        1-based data index range actually used.
    grid : ndarray
        Fractions (multiples of 1/T) at which the target was evaluated.
    values : ndarray
        Absolute target function at each grid point; the value at the
        right endpoint is 0 by construction.
    scale : float
        Long-run variance normalizer of the sub-sample.
    argmax_fraction : float
        Smallest grid fraction attaining the maximum value.
    statistic : float
        sqrt(end - start + 1) times the maximum value.
    """

    interval: Interval
    start: int
    end: int
    grid: np.ndarray
    values: np.ndarray
    scale: float
    argmax_fraction: float
    statistic: float


def profile(
    pair: SeriesPair,
    interval: Interval,
    hac: HacConfig | None = None,
    n_min: int = DEFAULT_MIN_SEGMENT,
) -> CusumProfile:
    """Evaluate the absolute target function on every grid point of an interval.

    Prefix correlations are computed incrementally left-to-right in one
    pass; the long-run variance scale is computed once on the sub-sample.
    Grid points whose prefix correlation is undefined (fewer than two
    distinct values early in the segment) contribute a value of 0.

    Raises
    ------
    SegmentTooShortError
        If the sub-sample holds fewer than ``n_min`` observations.
    DegenerateSegmentError, NonPositiveVarianceError
        Propagated from the long-run variance computation.
    """
    T = pair.T
    a = frac_to_index(interval.l1, T)
    b = prefix_end(interval.l2, interval.l1, T)
    n = b - a + 1
    if n < max(n_min, 2):
        raise SegmentTooShortError(
            f"segment [{a}, {b}] shorter than minimum length {n_min}"
        )
    comp = lrv_components(pair, a, b, hac)

    j_lo = math.ceil(interval.l1 * T - _GRID_EPS)
    j_hi = math.floor(interval.l2 * T + _GRID_EPS)
    js = np.arange(j_lo, j_hi + 1)
    grid = js / T
    ends = np.maximum(np.clip(js, 1, T - 1), a + 1)

    rho = prefix_correlations(pair, a, b)
    rho_segment = rho[n - 1]
    diffs = rho[ends - a] - rho_segment
    lengths = ends - a + 1
    values = np.abs(comp.scale * (lengths / n) * diffs)
    bad = ~np.isfinite(values)
    if bad.any():
        logger.warning(
            "%d degenerate prefix correlation(s) on [%d, %d]; assigned value 0",
            int(bad.sum()), a, b,
        )
        values[bad] = 0.0

    imax = int(np.argmax(values))  # first occurrence = smallest maximizer
    return CusumProfile(
        interval=interval,
        start=a,
        end=b,
        grid=grid,
        values=values,
        scale=comp.scale,
        argmax_fraction=float(grid[imax]),
        statistic=float(math.sqrt(n) * values[imax]),
    )


def estimate_changepoint(prof: CusumProfile, T: int) -> int:
    """Break location estimate: the data index of the profile's maximizer."""
    return prefix_end(prof.argmax_fraction, prof.interval.l1, T)
