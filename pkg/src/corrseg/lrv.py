"""Long-run variance scale of the correlation estimator.

The CUSUM statistic compares prefix correlations against the full-segment
correlation; to make its null limit pivotal (a standard Brownian bridge),
the path is multiplied by the inverse square root of the long-run variance
of the correlation estimator.  That scalar is assembled in three stages:

1. a Bartlett-kernel weighted covariance matrix of the demeaned moment
   vectors (x^2, y^2, x, y, x*y), robust to serial dependence;
2. a reduction to the (var_x, var_y, cov) coordinates via the chain rule
   for the mean terms;
3. a delta-method quadratic form with the gradient of the correlation as
   a function of those coordinates.

The kernel bandwidth is recomputed from each sub-sample's own length,
floor(ln n) by default with a minimum of 1.  With bandwidth 1 only the
lag-zero term survives.  The Bartlett kernel has compact support, so the
double sum over time pairs costs O(n * bandwidth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSegmentError, NonPositiveVarianceError, SegmentTooShortError
from .series import SeriesPair, accumulate

#: Shortest sub-sample on which the scale is computed at all.
MIN_LRV_LENGTH = 10

#: Default minimum segment length used by the segmentation layer; below this
#: the scale is too unstable and segments are treated as change-free.
DEFAULT_MIN_SEGMENT = 20


@dataclass(frozen=True)
class HacConfig:
    """Kernel and bandwidth choices for the long-run variance.

    ``fixed_bandwidth=None`` selects the default rule max(1, floor(ln n))
    where n is the sub-sample length; a positive integer pins the bandwidth.
    Only the Bartlett (triangular) kernel is supported.
    """

    fixed_bandwidth: int | None = None
    kernel: str = "bartlett"

    def __post_init__(self):
        if self.kernel != "bartlett":
            raise ValueError(f"unsupported kernel {self.kernel!r}")
        if self.fixed_bandwidth is not None and self.fixed_bandwidth < 1:
            raise ValueError("fixed bandwidth must be a positive integer")

    def bandwidth(self, n: int) -> int:
        if self.fixed_bandwidth is not None:
            return self.fixed_bandwidth
        return max(1, math.floor(math.log(n)))


@dataclass(frozen=True)
class LrvComponents:
    """Intermediate matrices and the final scale, kept for diagnostics.

    ``scale`` is the multiplier applied to the CUSUM path, i.e. the inverse
    square root of the estimated long-run variance of the correlation.
    """

    kernel_cov: np.ndarray  # 5x5 symmetric
    reduced_cov: np.ndarray  # 3x3 symmetric
    gradient: np.ndarray  # length 3
    gradient_cov: np.ndarray  # length 3
    scale: float

    def __post_init__(self):
        if not np.allclose(self.kernel_cov, self.kernel_cov.T, atol=1e-10):
            raise ValueError("kernel covariance must be symmetric")
        if not self.scale > 0.0:
            raise ValueError("scale must be positive")


def demeaned_moment_vectors(pair: SeriesPair, a: int, b: int) -> np.ndarray:
    """Per-observation moment vectors demeaned by their sub-sample means.

    Returns an (n, 5) array with columns x^2, y^2, x, y, x*y, each centred
    on its mean over observations a..b.  Every column sums to zero.

    Raises
    ------
    DegenerateSegmentError
        If either series is constant on the segment.
    """
    m = accumulate(pair, a, b)
    if m.n < 2 or m.var_x <= 0.0 or m.var_y <= 0.0:
        raise DegenerateSegmentError(f"segment [{a}, {b}] has zero variance")
    x = pair.x[a - 1 : b]
    y = pair.y[a - 1 : b]
    u = np.empty((m.n, 5))
    u[:, 0] = x * x - m.sum_xx / m.n
    u[:, 1] = y * y - m.sum_yy / m.n
    u[:, 2] = x - m.mean_x
    u[:, 3] = y - m.mean_y
    u[:, 4] = x * y - m.sum_xy / m.n
    return u


def kernel_weighted_cov(u: np.ndarray, bandwidth: int) -> np.ndarray:
    """Bartlett-weighted sum of lagged outer products, divided by n.

    Exploits the kernel's compact support: lags |h| >= bandwidth receive
    zero weight, so the cost is O(n * bandwidth) instead of O(n^2).
    """
    n = len(u)
    cov = u.T @ u
    for h in range(1, bandwidth):
        w = 1.0 - h / bandwidth
        c = u[:-h].T @ u[h:]
        cov += w * (c + c.T)
    return cov / n


def lrv_components(pair: SeriesPair, a: int, b: int, hac: HacConfig | None = None) -> LrvComponents:
    """Long-run variance scale of the correlation on observations a..b.

    Raises
    ------
    SegmentTooShortError
        If the segment is shorter than max(bandwidth + 1, 10).
    DegenerateSegmentError
        If either series is constant on the segment.
    NonPositiveVarianceError
        If the delta-method quadratic form is not positive; the segment is
        not testable and should be skipped by the caller.
    """
    hac = hac or HacConfig()
    n = b - a + 1
    gamma = hac.bandwidth(n)
    if n < max(gamma + 1, MIN_LRV_LENGTH):
        raise SegmentTooShortError(
            f"segment [{a}, {b}] too short for bandwidth {gamma} (n={n})"
        )
    u = demeaned_moment_vectors(pair, a, b)
    kernel_cov = kernel_weighted_cov(u, gamma)

    m = accumulate(pair, a, b)
    mx, my = m.mean_x, m.mean_y
    sx, sy = math.sqrt(m.var_x), math.sqrt(m.var_y)
    cxy = m.cov_xy
    # Gradient of cov/(sd_x*sd_y) with respect to (var_x, var_y, cov).
    gradient = np.array([
        -0.5 * cxy / (sy * sx**3),
        -0.5 * cxy / (sx * sy**3),
        1.0 / (sx * sy),
    ])
    # Chain rule from raw moments (x^2, y^2, x, y, xy) to the centred
    # coordinates (var_x, var_y, cov); rows absorb the mean derivatives.
    chain = np.array([
        [1.0, 0.0, -2.0 * mx, 0.0, 0.0],
        [0.0, 1.0, 0.0, -2.0 * my, 0.0],
        [0.0, 0.0, -my, -mx, 1.0],
    ])
    reduced = chain @ kernel_cov @ chain.T
    reduced = 0.5 * (reduced + reduced.T)
    gradient_cov = reduced @ gradient
    quad = float(gradient_cov @ gradient)
    if quad <= 0.0:
        raise NonPositiveVarianceError(
            f"non-positive correlation variance on segment [{a}, {b}]"
        )
    return LrvComponents(
        kernel_cov=kernel_cov,
        reduced_cov=reduced,
        gradient=gradient,
        gradient_cov=gradient_cov,
        scale=quad**-0.5,
    )


def lrv_scale(pair: SeriesPair, a: int, b: int, hac: HacConfig | None = None) -> float:
    """Convenience wrapper returning only the scale."""
    return lrv_components(pair, a, b, hac).scale
