"""Binary segmentation over the correlation CUSUM test.

The procedure announces a change when the full-sample statistic exceeds the
asymptotic critical value, splits the sample at the estimated break, and
re-tests every current segment until none rejects.  Detected locations are
then refined on windows spanning each point's two neighbours; a point whose
refinement window is insignificant is deleted, otherwise it is moved to the
window's maximizer.  Finally the correlation is estimated on each resulting
segment.

Significance levels shrink as points accumulate: with k points found, each
segment is tested at level alpha_k = 1 - (1 - alpha0)^(1/(k+1)), which keeps
the family-wise level at alpha0 across the k+1 simultaneous tests.  Critical
values are quantiles of the distribution of the supremum of the absolute
value of a standard Brownian bridge (the Kolmogorov distribution); at the
default alpha0 = 0.05 the initial critical value is 1.358.
"""

from __future__ import annotations

import logging
import math
from bisect import insort
from dataclasses import dataclass, field

from .cusum import CusumProfile, Interval, estimate_changepoint, profile
from .errors import (
    DegenerateSegmentError,
    InputError,
    NonPositiveVarianceError,
    SegmentTooShortError,
)
from .lrv import DEFAULT_MIN_SEGMENT, HacConfig
from .series import SeriesPair, accumulate, pearson

logger = logging.getLogger(__name__)

_SERIES_TRUNCATION = 1e-14
_BISECT_TOL = 1e-9


def kolmogorov_cdf(x: float) -> float:
    """Distribution function of the supremum of |standard Brownian bridge|.

    Evaluates 1 - 2 * sum_{k>=1} (-1)^(k+1) exp(-2 k^2 x^2), truncating the
    alternating series once a term drops below 1e-14.  Returns 0 for x <= 0.
    """
    if x <= 0.0:
        return 0.0
    acc = 0.0
    sign = 1.0
    k = 1
    while k < 10_000:
        term = math.exp(-2.0 * k * k * x * x)
        if term < _SERIES_TRUNCATION:
            break
        acc += sign * term
        sign = -sign
        k += 1
    return max(0.0, 1.0 - 2.0 * acc)


def critical_value(alpha: float) -> float:
    """Upper-alpha quantile of the sup-|Brownian bridge| law, by bisection."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    target = 1.0 - alpha
    lo, hi = 0.3, 4.0
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if kolmogorov_cdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def alpha_schedule(alpha0: float, k: int) -> float:
    """Per-stage significance level after k accepted points.

    Solves (1 - alpha0) = (1 - alpha_k)^(k+1), so the k+1 simultaneous
    segment tests jointly keep the family-wise level at alpha0.
    """
    if not 0.0 < alpha0 < 1.0:
        raise ValueError("alpha0 must lie strictly between 0 and 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    return 1.0 - (1.0 - alpha0) ** (1.0 / (k + 1))


@dataclass(frozen=True)
class SegmentationConfig:
    alpha0: float = 0.05
    n_min: int = DEFAULT_MIN_SEGMENT
    max_changepoints: int | None = None  # None: T // n_min
    hac: HacConfig = field(default_factory=HacConfig)

    def __post_init__(self):
        if not 0.0 < self.alpha0 < 1.0:
            raise ValueError("alpha0 must lie strictly between 0 and 1")
        if self.n_min < 10:
            raise ValueError("n_min must be at least 10")
        if self.max_changepoints is not None and self.max_changepoints < 1:
            raise ValueError("max_changepoints must be positive")


@dataclass(frozen=True)
class AlphaLevel:
    """One row of the significance schedule actually used in a run."""

    k: int
    alpha: float
    critical_value: float


@dataclass(frozen=True)
class IterationRecord:
    """One segment test, in the order the procedure performed them."""

    step: str  # "detect" or "refine"
    start: int  # 1-based inclusive data range tested
    end: int
    statistic: float
    critical_value: float
    significant: bool
    candidate_index: int
    candidate_fraction: float
    candidate_label: str | None = None

    def __post_init__(self):
        if self.significant != (self.statistic > self.critical_value):
            raise ValueError("significance flag inconsistent with statistic")


@dataclass(frozen=True)
class ChangePointReport:
    """Everything the segmentation produced, in deterministic order."""

    T: int
    changepoints: tuple[int, ...]
    fractions: tuple[float, ...]
    segment_correlations: tuple[float | None, ...]
    iterations: tuple[IterationRecord, ...]
    alpha_schedule_used: tuple[AlphaLevel, ...]
    changepoint_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if list(self.changepoints) != sorted(set(self.changepoints)):
            raise ValueError("changepoints must be strictly increasing")
        if any(not 1 <= c <= self.T - 1 for c in self.changepoints):
            raise ValueError("changepoints must lie in [1, T-1]")
        if len(self.segment_correlations) != len(self.changepoints) + 1:
            raise ValueError("need one correlation per segment")


class _Tester:
    """Shared state for one detection run: schedule cache and iteration log."""

    def __init__(self, pair: SeriesPair, config: SegmentationConfig):
        self.pair = pair
        self.config = config
        self.levels: dict[int, AlphaLevel] = {}
        self.iterations: list[IterationRecord] = []
        self.profiles: list[CusumProfile] = []

    def level(self, k: int) -> AlphaLevel:
        if k not in self.levels:
            a = alpha_schedule(self.config.alpha0, k)
            self.levels[k] = AlphaLevel(k=k, alpha=a, critical_value=critical_value(a))
        return self.levels[k]

    def label(self, index: int) -> str | None:
        ts = self.pair.timestamps
        return ts[index - 1] if ts is not None else None

    def test(self, l1: float, l2: float, k: int, step: str) -> tuple[IterationRecord, int, CusumProfile] | None:
        """Run one segment test at schedule level k; None if untestable."""
        try:
            prof = profile(self.pair, Interval(l1, l2), self.config.hac, self.config.n_min)
        except SegmentTooShortError:
            logger.debug("segment [%g, %g] below minimum length; treated as change-free", l1, l2)
            return None
        except (DegenerateSegmentError, NonPositiveVarianceError) as exc:
            logger.warning("segment [%g, %g] not testable (%s); skipped", l1, l2, exc)
            return None
        lvl = self.level(k)
        cand = estimate_changepoint(prof, self.pair.T)
        rec = IterationRecord(
            step=step,
            start=prof.start,
            end=prof.end,
            statistic=prof.statistic,
            critical_value=lvl.critical_value,
            significant=prof.statistic > lvl.critical_value,
            candidate_index=cand,
            candidate_fraction=cand / self.pair.T,
            candidate_label=self.label(cand),
        )
        self.iterations.append(rec)
        self.profiles.append(prof)
        return rec, cand, prof


def _segment_bounds(points: list[int], T: int) -> list[tuple[float, float]]:
    """Fraction intervals of the segments delimited by the current points."""
    edges = [0] + points + [T]
    out = []
    for left, right in zip(edges[:-1], edges[1:]):
        out.append(((left + 1) / T, right / T if right < T else 1.0))
    return out


def detect(pair: SeriesPair, config: SegmentationConfig | None = None) -> ChangePointReport:
    """Estimate the number and location of correlation change points.

    Runs the full four-step procedure and returns the accepted points in
    increasing order together with per-segment correlations and the
    complete iteration log.  Deterministic for fixed inputs.

    Raises
    ------
    InputError
        If the series is shorter than twice the minimum segment length.
    """
    return detect_with_profiles(pair, config)[0]


def detect_with_profiles(
    pair: SeriesPair, config: SegmentationConfig | None = None
) -> tuple[ChangePointReport, tuple[CusumProfile, ...]]:
    """Like :func:`detect`, also returning the profile behind each iteration
    record (same order), for profile exports and figures."""
    config = config or SegmentationConfig()
    T = pair.T
    if T < 2 * config.n_min:
        raise InputError(f"need at least {2 * config.n_min} observations, got {T}")
    cap = config.max_changepoints if config.max_changepoints is not None else T // config.n_min

    tester = _Tester(pair, config)
    points: list[int] = []

    # Step 1: full-sample test at the initial level.
    first = tester.test(0.0, 1.0, k=0, step="detect")
    if first is None:
        raise InputError("full sample is not testable")
    rec, cand, _ = first
    if rec.significant:
        points.append(cand)

        # Step 2: re-test every segment, splitting at each accepted break,
        # until a round makes no new discovery.  Segments run left to right
        # and the schedule level tracks the running count of points.
        while True:
            found_any = False
            for l1, l2 in _segment_bounds(points, T):
                out = tester.test(l1, l2, k=len(points), step="detect")
                if out is None:
                    continue
                rec, cand, _ = out
                if rec.significant:
                    if len(points) >= cap:
                        logger.warning("changepoint cap %d reached; further breaks ignored", cap)
                        continue
                    if cand in points:
                        logger.warning("duplicate break candidate %d ignored", cand)
                        continue
                    insort(points, cand)
                    found_any = True
            if not found_any or len(points) >= cap:
                break

        # Step 3: refinement on windows spanning each point's neighbours,
        # at the schedule level reached in step 2 (never re-raised after
        # deletions).  A deleted point restarts the pass; a pass with no
        # change ends the loop.  Only meaningful with two or more points.
        k_ref = len(points)
        max_passes = 10 * max(1, len(points))
        passes = 0
        changed = len(points) >= 2
        while changed and len(points) >= 2 and passes < max_passes:
            passes += 1
            changed = False
            i = 0
            while i < len(points):
                l1 = (points[i - 1] + 1) / T if i > 0 else 1 / T
                l2 = points[i + 1] / T if i + 1 < len(points) else 1.0
                out = tester.test(l1, l2, k=k_ref, step="refine")
                if out is None:
                    logger.info(
                        "refinement window for point %d not testable; point kept as-is",
                        points[i],
                    )
                    i += 1
                    continue
                rec, cand, _ = out
                if not rec.significant:
                    del points[i]
                    changed = True
                    break  # restart the pass
                if cand != points[i]:
                    points[i] = cand
                    changed = True
                i += 1

    # Step 4: plain correlation on each final segment of the partition.
    correlations: list[float | None] = []
    for left, right in zip([0] + points, points + [T]):
        try:
            correlations.append(pearson(accumulate(pair, left + 1, right)))
        except DegenerateSegmentError:
            logger.warning("segment [%d, %d] degenerate; correlation undefined", left + 1, right)
            correlations.append(None)

    labels = None
    if pair.timestamps is not None:
        labels = tuple(pair.timestamps[p - 1] for p in points)
    report = ChangePointReport(
        T=T,
        changepoints=tuple(points),
        fractions=tuple(p / T for p in points),
        segment_correlations=tuple(correlations),
        iterations=tuple(tester.iterations),
        alpha_schedule_used=tuple(tester.levels[k] for k in sorted(tester.levels)),
        changepoint_labels=labels,
    )
    return report, tuple(tester.profiles)
