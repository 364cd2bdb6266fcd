import math

import numpy as np
import pytest

from corrseg import (
    BreakSchedule,
    DccSpec,
    GarchParams,
    Var1Spec,
    accumulate,
    derive_seed,
    dominance_profile,
    pearson,
    simulate_dcc,
    simulate_var1,
    spec_from_dict,
    spec_to_dict,
)


class TestBreakSchedule:
    def test_validation(self):
        with pytest.raises(ValueError):
            BreakSchedule(breaks=(0.5, 0.25), levels=(0.1, 0.2, 0.3))
        with pytest.raises(ValueError):
            BreakSchedule(breaks=(0.0,), levels=(0.1, 0.2))
        with pytest.raises(ValueError):
            BreakSchedule(breaks=(0.5,), levels=(0.1,))

    def test_levels_for_regime_boundaries(self):
        sched = BreakSchedule(breaks=(0.5,), levels=(0.25, -0.25))
        lv = sched.levels_for(1000)
        assert lv[498] == 0.25  # t=499, fraction 0.499
        assert lv[499] == -0.25  # t=500, fraction 0.500: new regime is closed-left
        assert lv[999] == -0.25

    def test_level_at_one_is_last_regime(self):
        sched = BreakSchedule(breaks=(0.25, 0.75), levels=(0.5, 0.7, 0.6))
        assert sched.level_at(1.0) == 0.6
        assert sched.level_at(0.75) == 0.6
        assert sched.level_at(0.74999) == 0.7

    def test_correlation_guard_only_where_needed(self):
        mean_sched = BreakSchedule(breaks=(0.5,), levels=(0.5, 1.0))  # fine as means
        with pytest.raises(ValueError):
            Var1Spec(phi=0.0, schedule=mean_sched, T=100, seed=1)
        spec = Var1Spec(
            phi=0.0,
            schedule=BreakSchedule.constant(0.2),
            T=100,
            seed=1,
            mean_schedule=mean_sched,
        )
        assert spec.mean_schedule is mean_sched


class TestDeriveSeed:
    def test_deterministic_and_distinct(self):
        assert derive_seed(1, 0, 0) == derive_seed(1, 0, 0)
        seen = {derive_seed(1, c, r) for c in range(3) for r in range(50)}
        assert len(seen) == 150


class TestVar1:
    def test_bitwise_determinism(self):
        spec = Var1Spec(phi=0.5, schedule=BreakSchedule.constant(0.3), T=500, seed=11)
        a, b = simulate_var1(spec), simulate_var1(spec)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
        other = simulate_var1(Var1Spec(phi=0.5, schedule=BreakSchedule.constant(0.3), T=500, seed=12))
        assert not np.array_equal(a.x, other.x)

    def test_iid_case_mean(self):
        spec = Var1Spec(phi=0.0, schedule=BreakSchedule.constant(0.2), T=4000, seed=21)
        pair = simulate_var1(spec)
        bound = 4.0 / math.sqrt(spec.T)
        assert abs(pair.x.mean() - 0.5) < bound
        assert abs(pair.y.mean() - 0.5) < bound

    def test_lag_one_autocorrelation(self):
        spec = Var1Spec(phi=-0.5, schedule=BreakSchedule.constant(0.5), T=2000, seed=22)
        pair = simulate_var1(spec)
        x = pair.x - pair.x.mean()
        acf1 = float(x[1:] @ x[:-1] / (x @ x))
        assert abs(acf1 - (-0.5)) < 0.06

    def test_regime_correlations(self):
        spec = Var1Spec(
            phi=0.0, schedule=BreakSchedule(breaks=(0.5,), levels=(0.6, -0.6)), T=4000, seed=23
        )
        pair = simulate_var1(spec)
        first = pearson(accumulate(pair, 1, 2000))
        second = pearson(accumulate(pair, 2001, 4000))
        assert abs(first - 0.6) < 0.06
        assert abs(second + 0.6) < 0.06

    def test_mean_schedule_levels(self):
        spec = Var1Spec(
            phi=0.0,
            schedule=BreakSchedule.constant(0.0),
            T=4000,
            seed=24,
            mean_schedule=BreakSchedule(breaks=(0.5,), levels=(0.5, 1.0)),
        )
        pair = simulate_var1(spec)
        assert abs(pair.x[:2000].mean() - 0.5) < 0.08
        assert abs(pair.x[2000:].mean() - 1.0) < 0.08
        assert abs(pair.y[2000:].mean() - 1.0) < 0.08

    def test_stationarity_guard(self):
        with pytest.raises(ValueError):
            Var1Spec(phi=1.0, schedule=BreakSchedule.constant(0.0), T=100, seed=1)


class TestDcc:
    def test_bitwise_determinism(self):
        spec = DccSpec(schedule=BreakSchedule.constant(0.5), T=400, seed=31)
        a, b = simulate_dcc(spec), simulate_dcc(spec)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_collapsed_recursions(self):
        # alpha = 0 and theta1 = theta2 = 0: variances pinned at omega/(1-beta),
        # correlation pinned at rho.
        spec = DccSpec(
            schedule=BreakSchedule.constant(0.4),
            T=4000,
            seed=32,
            garch_x=GarchParams(omega=1e-4, alpha=0.0, beta=0.85),
            garch_y=GarchParams(omega=1e-4, alpha=0.0, beta=0.8),
            theta1=0.0,
            theta2=0.0,
        )
        pair = simulate_dcc(spec)
        assert pair.x.std() == pytest.approx(math.sqrt(1e-4 / 0.15), rel=0.05)
        assert pair.y.std() == pytest.approx(math.sqrt(1e-4 / 0.2), rel=0.05)
        assert pearson(accumulate(pair, 1, 4000)) == pytest.approx(0.4, abs=0.04)

    def test_unconditional_correlation_targets_rho(self):
        cors = []
        for s in range(7):
            spec = DccSpec(schedule=BreakSchedule.constant(0.5), T=4000,
                           seed=derive_seed(5151, 0, s))
            pair = simulate_dcc(spec)
            cors.append(pearson(accumulate(pair, 1, 4000)))
        assert abs(float(np.median(cors)) - 0.5) < 0.06

    def test_rolling_window_mode_runs(self):
        spec = DccSpec(schedule=BreakSchedule.constant(0.5), T=1000, seed=33, psi_window=2)
        pair = simulate_dcc(spec)
        assert np.isfinite(pair.x).all() and np.isfinite(pair.y).all()
        rho = pearson(accumulate(pair, 1, 1000))
        # The small-window rolling feedback attenuates the correlation.
        assert -1.0 < rho < 0.5

    def test_break_shifts_correlation(self):
        spec = DccSpec(
            schedule=BreakSchedule(breaks=(0.5,), levels=(0.5, 0.8)), T=4000, seed=34
        )
        pair = simulate_dcc(spec)
        first = pearson(accumulate(pair, 1, 2000))
        second = pearson(accumulate(pair, 2001, 4000))
        assert second - first > 0.15


class TestSpecSerialization:
    def test_var1_round_trip(self):
        spec = Var1Spec(
            phi=0.8,
            schedule=BreakSchedule(breaks=(0.25, 0.75), levels=(0.25, 0.5, 0.0)),
            T=1500,
            seed=99,
            mean_schedule=BreakSchedule(breaks=(0.5,), levels=(0.5, 1.0)),
        )
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_dcc_round_trip(self):
        spec = DccSpec(
            schedule=BreakSchedule(breaks=(0.5,), levels=(0.5, 0.8)),
            T=800,
            seed=7,
            psi_window=4,
        )
        assert spec_from_dict(spec_to_dict(spec)) == spec
        default = DccSpec(schedule=BreakSchedule.constant(0.0), T=100, seed=1)
        assert spec_from_dict(spec_to_dict(default)) == default

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError):
            spec_from_dict({"model": "var1", "levels": [0.0], "T": 100, "seed": 1, "bogus": 2})
        with pytest.raises(ValueError):
            spec_from_dict({"model": "arma", "levels": [0.0], "T": 100, "seed": 1})


class TestDominanceProfile:
    def test_single_dominating_break(self):
        sched = BreakSchedule(breaks=(0.5, 0.75), levels=(0.5, 0.7, 0.6))
        prof = dominance_profile(sched)
        assert prof.unique and not prof.constant
        assert prof.maximizers == (0.5,)
        assert prof.max_value == pytest.approx(0.0375, abs=1e-12)

    def test_symmetric_breaks_tie(self):
        sched = BreakSchedule(breaks=(0.25, 0.75), levels=(0.5, 0.7, 0.5))
        prof = dominance_profile(sched)
        assert not prof.unique and not prof.constant
        assert prof.maximizers == (0.25, 0.75)
        assert prof.max_value == pytest.approx(0.025, abs=1e-12)

    def test_constant_schedule(self):
        prof = dominance_profile(BreakSchedule.constant(0.4))
        assert prof.constant and not prof.unique
        assert prof.maximizers == ()
        np.testing.assert_allclose(prof.values, 0.0, atol=1e-15)

    def test_endpoints_exactly_zero(self):
        sched = BreakSchedule(breaks=(0.3,), levels=(0.2, 0.6))
        prof = dominance_profile(sched, l1=0.1, l2=0.9, grid_size=101)
        assert prof.values[0] == 0.0
        assert prof.values[-1] == 0.0

    def test_piecewise_linear_midpoint_identity(self):
        sched = BreakSchedule(breaks=(0.5, 0.75), levels=(0.5, 0.7, 0.6))
        # grid step 1/512 keeps triples of consecutive points inside a regime
        prof = dominance_profile(sched, grid_size=513)
        g, v = prof.grid, prof.values
        for i in range(1, len(g) - 1):
            inside = any(
                lo + 2 / 512 <= g[i + 1] and g[i - 1] >= lo and g[i + 1] <= hi
                for lo, hi in zip(sched.boundaries[:-1], sched.boundaries[1:])
                if g[i - 1] >= lo and g[i + 1] <= hi
            )
            if inside:
                assert v[i] == pytest.approx(0.5 * (v[i - 1] + v[i + 1]), abs=1e-12)

    def test_subinterval_examples(self):
        # Restricted to [0.5, 1], the second example's dominating break is 0.75.
        sched = BreakSchedule(breaks=(0.25, 0.75), levels=(0.5, 0.7, 0.5))
        prof = dominance_profile(sched, l1=0.5, l2=1.0)
        assert prof.unique
        assert prof.maximizers == (0.75,)

    def test_grid_size_validation(self):
        with pytest.raises(ValueError):
            dominance_profile(BreakSchedule.constant(0.1), grid_size=1)
