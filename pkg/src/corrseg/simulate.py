"""Seedable generators for the two Monte Carlo scenarios, plus the
dominance profile that identifies which of several breaks an interval's
maximizer targets.

Both generators draw from a counter-based Philox stream keyed by the spec's
seed, so identical specs produce bitwise-identical series on any host and
under any degree of parallelism.  Replication streams for experiment
harnesses should be derived with :func:`derive_seed`.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .series import SeriesPair

logger = logging.getLogger(__name__)


def derive_seed(master_seed: int, *key: int) -> int:
    """A 64-bit stream seed for a (cell, replication, ...) coordinate.

    Derivations are independent of execution order, so parallel and serial
    runs agree, and extending a run never reseeds earlier replications.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class BreakSchedule:
    """A step function on [0, 1]: interior break fractions and one level
    per regime (len(levels) == len(breaks) + 1).

    Regime i covers [z_i, z_{i+1}) with z_0 = 0 and the last regime closed
    at 1.  An empty ``breaks`` means a single constant regime.
    """

    breaks: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        breaks = tuple(float(z) for z in self.breaks)
        levels = tuple(float(v) for v in self.levels)
        if len(levels) != len(breaks) + 1:
            raise ValueError("need exactly one level per regime")
        if any(not 0.0 < z < 1.0 for z in breaks):
            raise ValueError("break fractions must lie strictly inside (0, 1)")
        if any(b >= c for b, c in zip(breaks, breaks[1:])):
            raise ValueError("break fractions must be strictly increasing")
        if any(not math.isfinite(v) for v in levels):
            raise ValueError("levels must be finite")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "levels", levels)

    @classmethod
    def constant(cls, level: float) -> "BreakSchedule":
        return cls(breaks=(), levels=(level,))

    @property
    def boundaries(self) -> tuple[float, ...]:
        return (0.0, *self.breaks, 1.0)

    def level_at(self, u: float) -> float:
        return self.levels[bisect_right(self.breaks, u)]

    def levels_for(self, T: int) -> np.ndarray:
        """Level at each observation fraction t/T, t = 1..T."""
        u = np.arange(1, T + 1) / T
        idx = np.searchsorted(np.asarray(self.breaks), u, side="right")
        return np.asarray(self.levels)[idx]

    def require_correlations(self, what: str) -> None:
        if any(abs(v) >= 1.0 for v in self.levels):
            raise ValueError(f"{what} levels must be correlations in (-1, 1)")


@dataclass(frozen=True)
class Var1Spec:
    """First-order vector autoregression with a common scalar coefficient,
    unit-variance Gaussian innovations whose correlation follows the break
    schedule, and an optional schedule of level shifts in the mean."""

    phi: float
    schedule: BreakSchedule
    T: int
    seed: int
    mean: tuple[float, float] = (0.5, 0.5)
    mean_schedule: BreakSchedule | None = None
    burn_in: int = 200

    def __post_init__(self):
        if not abs(self.phi) < 1.0:
            raise ValueError("|phi| < 1 required for stationarity")
        if self.T < 2:
            raise ValueError("T must be at least 2")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if len(self.mean) != 2:
            raise ValueError("mean must hold one value per series")
        object.__setattr__(self, "mean", (float(self.mean[0]), float(self.mean[1])))
        self.schedule.require_correlations("innovation correlation")


@dataclass(frozen=True)
class GarchParams:
    """GARCH(1,1) recursion h_t = omega + alpha * x_{t-1}^2 + beta * h_{t-1}."""

    omega: float = 1e-4
    alpha: float = 0.1
    beta: float = 0.85

    def __post_init__(self):
        if self.omega <= 0 or self.alpha < 0 or self.beta < 0:
            raise ValueError("omega must be positive, alpha and beta non-negative")
        if self.alpha + self.beta >= 1.0:
            raise ValueError("alpha + beta < 1 required for stationarity")

    @property
    def unconditional(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


@dataclass(frozen=True)
class DccSpec:
    """Dynamic conditional correlation with GARCH(1,1) volatilities.

    The conditional correlation follows

        R_t = (1 - theta1 - theta2) * rho + theta1 * R_{t-1} + theta2 * psi_{t-1}

    where rho is the schedule level at t/T.  With ``psi_window=None`` (the
    default) the feedback term psi targets the schedule level itself, so R
    is exactly constant between breaks and approaches a new level
    exponentially after one; this reproduces the reference tables, whose
    null behaviour requires a non-wandering conditional correlation.  With
    an integer window M, psi is instead the rolling sample correlation
    (uncentred, residuals are conditionally mean-zero) of the last M
    standardized residual pairs; that variant makes R itself a persistent
    stochastic process, which a constancy test rightly flags, so expect
    heavily inflated detection counts.
    """

    schedule: BreakSchedule
    T: int
    seed: int
    garch_x: GarchParams = GarchParams(omega=1e-4, alpha=0.1, beta=0.85)
    garch_y: GarchParams = GarchParams(omega=1e-4, alpha=0.15, beta=0.8)
    theta1: float = 0.95
    theta2: float = 0.03
    psi_window: int | None = None
    burn_in: int = 200

    def __post_init__(self):
        if self.theta1 < 0 or self.theta2 < 0 or self.theta1 + self.theta2 >= 1.0:
            raise ValueError("theta1 + theta2 < 1 required, both non-negative")
        if self.psi_window is not None and self.psi_window < 1:
            raise ValueError("psi_window must be a positive integer or None")
        if self.T < 2:
            raise ValueError("T must be at least 2")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        self.schedule.require_correlations("conditional correlation")


def simulate_var1(spec: Var1Spec) -> SeriesPair:
    """Simulate the VAR(1) scenario. Deterministic given the spec."""
    rng = _rng(spec.seed)
    total = spec.burn_in + spec.T

    rho0 = spec.schedule.levels[0]
    rho = np.concatenate([
        np.full(spec.burn_in, rho0),
        spec.schedule.levels_for(spec.T),
    ])

    # Stationary start: innovations scaled by 1/sqrt(1 - phi^2).
    z0 = rng.standard_normal(2)
    w0 = np.array([z0[0], rho0 * z0[0] + math.sqrt(1.0 - rho0**2) * z0[1]])
    w0 /= math.sqrt(1.0 - spec.phi**2)

    z = rng.standard_normal((total, 2))
    eps = np.empty_like(z)
    eps[:, 0] = z[:, 0]
    eps[:, 1] = rho * z[:, 0] + np.sqrt(1.0 - rho**2) * z[:, 1]

    w = np.empty_like(eps)
    for col in range(2):
        w[:, col], _ = lfilter([1.0], [1.0, -spec.phi], eps[:, col], zi=[spec.phi * w0[col]])
    w = w[spec.burn_in :]

    if spec.mean_schedule is not None:
        mean = spec.mean_schedule.levels_for(spec.T)
        return SeriesPair(w[:, 0] + mean, w[:, 1] + mean)
    return SeriesPair(w[:, 0] + spec.mean[0], w[:, 1] + spec.mean[1])


def simulate_dcc(spec: DccSpec) -> SeriesPair:
    """Simulate the DCC scenario. Deterministic given the spec."""
    rng = _rng(spec.seed)
    total = spec.burn_in + spec.T
    M = spec.psi_window or 0
    th1, th2 = spec.theta1, spec.theta2
    gx, gy = spec.garch_x, spec.garch_y

    rho0 = spec.schedule.levels[0]
    rho = np.concatenate([
        np.full(spec.burn_in, rho0),
        spec.schedule.levels_for(spec.T),
    ]).tolist()

    z = rng.standard_normal((total + M, 2))
    # Seed the residual window with draws at the initial correlation.
    s0 = math.sqrt(1.0 - rho0**2)
    ex = [float(z[i, 0]) for i in range(M)]
    ey = [rho0 * float(z[i, 0]) + s0 * float(z[i, 1]) for i in range(M)]
    z = z[M:].tolist()

    hx, hy = gx.unconditional, gy.unconditional
    R = rho0
    x_out = np.empty(total)
    y_out = np.empty(total)
    clamped = 0
    for t in range(total):
        if M:
            window_x = ex[t : t + M]
            window_y = ey[t : t + M]
            sxy = sum(a * b for a, b in zip(window_x, window_y))
            sxx = sum(a * a for a in window_x)
            syy = sum(b * b for b in window_y)
            psi = sxy / math.sqrt(sxx * syy) if sxx > 0.0 and syy > 0.0 else 0.0
        else:
            psi = rho[t]
        R = (1.0 - th1 - th2) * rho[t] + th1 * R + th2 * psi
        if abs(R) > 1.0 - 1e-6:
            R = math.copysign(1.0 - 1e-6, R)
            clamped += 1
        z1, z2 = z[t]
        e1 = z1
        e2 = R * z1 + math.sqrt(1.0 - R * R) * z2
        x = math.sqrt(hx) * e1
        y = math.sqrt(hy) * e2
        x_out[t] = x
        y_out[t] = y
        if M:
            ex.append(e1)
            ey.append(e2)
        hx = gx.omega + gx.alpha * x * x + gx.beta * hx
        hy = gy.omega + gy.alpha * y * y + gy.beta * hy
    if clamped:
        logger.warning("conditional correlation clamped to the unit interval %d time(s)", clamped)
    return SeriesPair(x_out[spec.burn_in :], y_out[spec.burn_in :])


def spec_to_dict(spec: Var1Spec | DccSpec) -> dict:
    """Plain-type representation of a generator spec, for JSON configs."""
    if isinstance(spec, Var1Spec):
        out = {
            "model": "var1",
            "phi": spec.phi,
            "levels": list(spec.schedule.levels),
            "breaks": list(spec.schedule.breaks),
            "T": spec.T,
            "seed": spec.seed,
            "mean": list(spec.mean),
            "burn_in": spec.burn_in,
        }
        if spec.mean_schedule is not None:
            out["mean_levels"] = list(spec.mean_schedule.levels)
            out["mean_breaks"] = list(spec.mean_schedule.breaks)
        return out
    return {
        "model": "dcc",
        "levels": list(spec.schedule.levels),
        "breaks": list(spec.schedule.breaks),
        "T": spec.T,
        "seed": spec.seed,
        "garch_x": [spec.garch_x.omega, spec.garch_x.alpha, spec.garch_x.beta],
        "garch_y": [spec.garch_y.omega, spec.garch_y.alpha, spec.garch_y.beta],
        "theta1": spec.theta1,
        "theta2": spec.theta2,
        "psi_window": spec.psi_window,
        "burn_in": spec.burn_in,
    }


def spec_from_dict(data: dict) -> Var1Spec | DccSpec:
    """Inverse of :func:`spec_to_dict`; unknown keys are rejected."""
    d = dict(data)
    model = d.pop("model", None)
    schedule = BreakSchedule(breaks=tuple(d.pop("breaks", ())), levels=tuple(d.pop("levels")))
    common = {"schedule": schedule, "T": int(d.pop("T")), "seed": int(d.pop("seed", 0))}
    if "burn_in" in d:
        common["burn_in"] = int(d.pop("burn_in"))
    if model == "var1":
        if "mean_levels" in d or "mean_breaks" in d:
            common["mean_schedule"] = BreakSchedule(
                breaks=tuple(d.pop("mean_breaks", ())),
                levels=tuple(d.pop("mean_levels")),
            )
        if "mean" in d:
            common["mean"] = tuple(d.pop("mean"))
        spec = Var1Spec(phi=float(d.pop("phi", 0.0)), **common)
    elif model == "dcc":
        for key in ("garch_x", "garch_y"):
            if key in d:
                omega, alpha, beta = d.pop(key)
                common[key] = GarchParams(omega=omega, alpha=alpha, beta=beta)
        for key in ("theta1", "theta2"):
            if key in d:
                common[key] = float(d.pop(key))
        if "psi_window" in d:
            pw = d.pop("psi_window")
            common["psi_window"] = None if pw is None else int(pw)
        spec = DccSpec(**common)
    else:
        raise ValueError(f"unknown model {model!r}; expected 'var1' or 'dcc'")
    if d:
        raise ValueError(f"unknown spec keys: {sorted(d)}")
    return spec


@dataclass(frozen=True)
class DominanceProfile:
    """Exact evaluation of the drift a step schedule induces in the CUSUM
    target on an interval: the integral of the step function from l1 minus
    its linear interpolation between l1 and l2.

    The function is piecewise linear, vanishes exactly at both endpoints,
    and its absolute value attains its maximum at a step boundary.  The
    maximizer set decides which break dominates the interval: a unique
    maximizer is the break the argmax estimator targets.
    """

    grid: np.ndarray
    values: np.ndarray
    maximizers: tuple[float, ...]
    max_value: float
    unique: bool
    constant: bool


_DOMINANCE_TOL = 1e-12


def dominance_profile(
    schedule: BreakSchedule,
    l1: float = 0.0,
    l2: float = 1.0,
    grid_size: int = 512,
) -> DominanceProfile:
    """Evaluate the absolute dominance function on a grid, in closed form.

    ``schedule`` levels are read as the step function's values directly
    (cross-moment offsets); they are not restricted to correlations.
    """
    if not 0.0 <= l1 < l2 <= 1.0:
        raise ValueError("need 0 <= l1 < l2 <= 1")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")

    knots = np.asarray(schedule.boundaries)
    levels = np.asarray(schedule.levels)
    # Cumulative integral of the step function at each knot.
    cum = np.concatenate([[0.0], np.cumsum(levels * np.diff(knots))])

    def integral(z):
        i = np.clip(np.searchsorted(knots, z, side="right") - 1, 0, len(levels) - 1)
        return cum[i] + levels[i] * (z - knots[i])

    base = integral(l1)
    total = integral(l2) - base

    def drift(z):
        return (integral(z) - base) - (z - l1) / (l2 - l1) * total

    grid = np.linspace(l1, l2, grid_size)
    values = np.abs(drift(grid))

    candidates = sorted({l1, l2, *(z for z in schedule.breaks if l1 < z < l2)})
    cand_vals = np.abs(drift(np.asarray(candidates)))
    max_value = float(cand_vals.max())
    constant = max_value <= _DOMINANCE_TOL
    maximizers = tuple(
        z for z, v in zip(candidates, cand_vals) if max_value - v <= _DOMINANCE_TOL
    )
    if constant:
        maximizers = ()
    return DominanceProfile(
        grid=grid,
        values=values,
        maximizers=maximizers,
        max_value=max_value,
        unique=not constant and len(maximizers) == 1,
        constant=constant,
    )
