import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import linear_gdp, lfp_path
from labprod import COUNTRY_PRESETS, AnnualSeries
from labprod.series import growth_rate
from labprod.errors import DegeneracyError, DomainError, InsufficientDataError, ParameterError
from labprod.model import (
    US_A1,
    US_A2,
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    LfpToCohortParams,
    N9ModelParams,
    check_params,
    excess_growth,
    n9_implied_by_lfp,
    out_of_range_years,
    potential_rate,
    productivity_from_g,
    productivity_from_lfp,
    productivity_from_n9,
    simulate_lfp,
    synthetic_population,
)


def cyclical_gdp(start=1950, n=45, amp=900.0, seed=None):
    k = np.arange(n)
    g = 8000 + 380 * k + amp * np.sin(2 * np.pi * k / 9)
    if seed is not None:
        g = g * (1 + np.random.default_rng(seed).normal(0, 0.004, n))
    return AnnualSeries(start, g, "G")


class TestParams:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(A2=400, B=0, C=0, N0=1),
            dict(A2=400, B=1, C=0, N0=0),
            dict(A2=0, B=1, C=0, N0=1),
            dict(A2=400, B=1, C=0, N0=1, T=6),
            dict(A2=400, B=1, C=0, N0=1, T=-1),
        ],
    )
    def test_gdp_invariants(self, kw):
        with pytest.raises(ParameterError):
            GdpModelParams(**kw)

    def test_lfp_params(self):
        with pytest.raises(ParameterError):
            LfpResponseParams(B2=1, C2=0, alpha=1, LFP0=1.2)
        with pytest.raises(ParameterError):
            LfpSimParams(A1=400, B1=0, C1=0, alpha=0, LFP0=0.6, t0=1960)
        with pytest.raises(ParameterError):
            N9ModelParams(B=0, C=0)
        with pytest.raises(ParameterError):
            LfpToCohortParams(B3=0, C3=0, alpha2=0, LFP0=0.6)


class TestPotentialRate:
    def test_division(self):
        G = AnnualSeries(2000, [21000.0])
        assert potential_rate(G, US_A1).values[0] == pytest.approx(0.02)
        assert potential_rate(G, US_A2).values[0] == pytest.approx(0.01895, abs=5e-6)

    def test_zero_constant(self):
        assert np.all(potential_rate(linear_gdp(), 0.0).values == 0)

    def test_decreasing_when_g_rises(self):
        assert np.all(np.diff(potential_rate(linear_gdp(), 420).values) < 0)

    def test_nonpositive(self):
        with pytest.raises(DomainError):
            potential_rate(AnnualSeries(2000, [1.0, -1.0]), 1.0)

    def test_excess_growth_vanishes_at_constant_increment(self):
        g = excess_growth(linear_gdp(step=420.0), 420.0)
        assert np.all(g.values == 0.0)


class TestSyntheticPopulation:
    def test_one_step(self):
        # G 20000 -> 20600 is dG/G = 0.03; A2/G = 400/20000 = 0.02; factor 1.02
        G = AnnualSeries(1999, [20_000.0, 20_600.0])
        N = synthetic_population(G, 400.0, 1_000_000.0, t0=1999, T=0)
        assert N[1999] == 1_000_000.0
        assert N[2000] == pytest.approx(1_020_000.0, rel=1e-12)

    def test_fixed_point(self):
        N = synthetic_population(linear_gdp(step=450.0), 450.0, 570_000.0, t0=1955, T=2)
        assert np.all(N.values == 570_000.0)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_linear_in_n0(self, k):
        G = cyclical_gdp()
        a = synthetic_population(G, 450.0, 570_000.0, 1955, 2).values
        b = synthetic_population(G, 450.0, 570_000.0 * k, 1955, 2).values
        np.testing.assert_allclose(b, a * k, rtol=1e-12)

    def test_span(self):
        G = cyclical_gdp(start=1950, n=45)
        N = synthetic_population(G, 450.0, 1.0, t0=1955, T=3)
        assert N.start_year == 1955 and N.end_year == 1994 + 3

    def test_needs_lagged_coverage(self):
        with pytest.raises(InsufficientDataError):
            synthetic_population(cyclical_gdp(start=1950), 450.0, 1.0, t0=1951, T=2)

    def test_degenerate_factor_names_year(self):
        G = AnnualSeries(1960, [10_000, 10_100, 4_000, 4_100])
        with pytest.raises(DegeneracyError) as exc:
            synthetic_population(G, 100.0, 1.0, t0=1960, T=0)
        assert exc.value.year == 1962
        assert "1962" in str(exc.value)

    def test_pulse_raises_population(self):
        base = linear_gdp(step=450.0)
        bumped = base.values.copy()
        bumped[10:] += 200.0  # one year of growth above the constant increment
        N0 = synthetic_population(base, 450.0, 1.0, 1952, 2)
        N1 = synthetic_population(base.with_values(bumped), 450.0, 1.0, 1952, 2)
        pulse_year = 1950 + 10 + 2
        before = N1.window(N1.start_year, pulse_year - 1).values
        after = N1.window(pulse_year, N1.end_year).values
        assert np.array_equal(before, N0.window(N0.start_year, pulse_year - 1).values)
        assert np.all(after > N0.window(pulse_year, N0.end_year).values)


class TestProductivityFromG:
    @pytest.mark.parametrize(
        "name, expected",
        [("france", 0.054), ("canada", 0.023625), ("italy", 0.096)],
    )
    def test_steady_state_from_published_sets(self, name, expected):
        p = COUNTRY_PRESETS[name]
        G = linear_gdp(start=p.t0 - p.T, step=p.A2)
        out = productivity_from_g(G, p)
        np.testing.assert_allclose(out.values, expected, rtol=1e-12)
        assert out.start_year == p.t0 + p.T

    @settings(max_examples=50)
    @given(st.floats(min_value=1e-3, max_value=1e3), st.integers(0, 10_000))
    def test_scale_degeneracy(self, k, seed):
        G = cyclical_gdp(seed=seed)
        p = COUNTRY_PRESETS["france"]
        q = GdpModelParams(A2=p.A2, B=p.B * k, C=p.C, N0=p.N0 * k, T=p.T, t0=1955)
        p = GdpModelParams(A2=p.A2, B=p.B, C=p.C, N0=p.N0, T=p.T, t0=1955)
        np.testing.assert_allclose(productivity_from_g(G, q).values, productivity_from_g(G, p).values, rtol=1e-12)

    @pytest.mark.parametrize("name", ["france", "italy", "canada", "uk", "japan"])
    def test_pulse_sign_follows_b(self, name):
        p = COUNTRY_PRESETS[name]
        base = linear_gdp(start=1950, n=30, level=8000.0, step=p.A2)
        bumped = base.values.copy()
        bumped[12:] += 150.0
        pp = GdpModelParams(A2=p.A2, B=p.B, C=p.C, N0=p.N0, T=p.T, t0=1955)
        a = productivity_from_g(base, pp)
        b = productivity_from_g(base.with_values(bumped), pp)
        changed = b.values - a.values
        first = 1950 + 12 + 2 * p.T
        tail = changed[first - a.start_year :]
        assert np.all(changed[: first - a.start_year] == 0)
        assert np.all(np.sign(tail) == np.sign(p.B))


class TestProductivityFromLfp:
    def test_reduces_to_intercept(self):
        lfp = AnnualSeries(1960, [0.65, 0.65, 0.65])
        p = LfpResponseParams(B2=-5.0, C2=0.040, alpha=5.0, LFP0=0.65)
        np.testing.assert_allclose(productivity_from_lfp(lfp, p).values, 0.040, rtol=1e-15)

    def test_single_point_oracle(self):
        lfp = AnnualSeries(1960, [0.66 / 1.005, 0.66])
        p = LfpResponseParams(B2=-5.0, C2=0.04, alpha=5.0, LFP0=0.65)
        # (-5*0.005 + 0.04) * exp(5 * 0.01/0.65), evaluated independently
        assert productivity_from_lfp(lfp, p).values[0] == pytest.approx(0.0161993849914228, rel=1e-12)

    @given(st.integers(0, 1000), st.floats(-10, 10), st.floats(-0.1, 0.1))
    def test_alpha_zero_is_affine(self, seed, B2, C2):
        lfp = lfp_path(seed=seed)
        out = productivity_from_lfp(lfp, LfpResponseParams(B2=B2, C2=C2, alpha=0.0, LFP0=0.62))
        r = np.diff(lfp.values) / lfp.values[:-1]
        np.testing.assert_allclose(out.values, B2 * r + C2, rtol=1e-12, atol=1e-15)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            productivity_from_lfp(AnnualSeries(1960, [0.6, 1.2]), LfpResponseParams(B2=1, C2=0, alpha=0, LFP0=0.6))


class TestProductivityFromN9:
    def test_published_constants(self):
        out = productivity_from_n9(AnnualSeries(2000, [4_000_000.0]), N9ModelParams(B=48e6, C=-0.062, T=2))
        assert out.start_year == 2002
        assert out.values[0] == pytest.approx(0.0213, abs=5e-5)

    def test_cancellation(self):
        out = productivity_from_n9(AnnualSeries(2000, [3e6]), N9ModelParams(B=48e6, C=-3e6 / 48e6, T=0))
        assert out.values[0] == 0.0

    def test_ratio_invariance(self):
        N9 = AnnualSeries(2000, [3.9e6, 4.0e6, 4.2e6])
        a = productivity_from_n9(N9, N9ModelParams(B=48e6, C=-0.062))
        b = productivity_from_n9(N9.with_values(N9.values * 2), N9ModelParams(B=96e6, C=-0.062))
        np.testing.assert_allclose(a.values, b.values, rtol=1e-15)


class TestImpliedN9:
    def test_reduction(self):
        lfp = AnnualSeries(1960, [0.6, 0.6, 0.6])
        out = n9_implied_by_lfp(lfp, LfpToCohortParams(B3=48e6, C3=4e6, alpha2=3.0, LFP0=0.6, T=2))
        assert out.start_year == 1959
        np.testing.assert_allclose(out.values, 4e6, rtol=1e-15)

    def test_alpha_zero_affine(self):
        lfp = lfp_path()
        out = n9_implied_by_lfp(lfp, LfpToCohortParams(B3=5e7, C3=3e6, alpha2=0.0, LFP0=0.62, T=0))
        r = np.diff(lfp.values) / lfp.values[:-1]
        np.testing.assert_allclose(out.values, 5e7 * r + 3e6, rtol=1e-12)

    @settings(max_examples=100)
    @given(
        st.integers(0, 10_000),
        st.floats(0.1, 10),
        st.floats(0.1, 10),
        st.floats(0, 8),
        st.sampled_from([1.0, -1.0]),
    )
    def test_moves_with_productivity_for_same_sign_slopes(self, seed, b2, b3, alpha, sign):
        """Both left sides move the same way when dLFP/LFP moves, for B2, B3 of equal sign."""
        rng = np.random.default_rng(seed)
        level = rng.uniform(0.55, 0.7)
        r_lo, r_hi = sorted(rng.uniform(-0.02, 0.02, 2))
        if r_hi - r_lo < 1e-6:
            return
        lo = AnnualSeries(1960, [level / (1 + r_lo), level])
        hi = AnnualSeries(1960, [level / (1 + r_hi), level])
        pp = LfpResponseParams(B2=sign * b2, C2=0.03, alpha=alpha, LFP0=0.62)
        pc = LfpToCohortParams(B3=sign * b3, C3=1.0, alpha2=alpha, LFP0=0.62, T=0)
        d_prod = productivity_from_lfp(hi, pp).values[0] - productivity_from_lfp(lo, pp).values[0]
        d_n9 = n9_implied_by_lfp(hi, pc).values[0] - n9_implied_by_lfp(lo, pc).values[0]
        assert np.sign(d_prod) == np.sign(d_n9) == sign


class TestSimulateLfp:
    def test_stays_put_when_driver_matches_intercept(self):
        # constant dollar increment equal to A1 makes the driver exactly 0 = C1
        G = linear_gdp(step=US_A1)
        p = LfpSimParams(A1=US_A1, B1=-5.0, C1=0.0, alpha=5.0, LFP0=0.66, t0=1955, T=2)
        out = simulate_lfp(G, p)
        assert np.all(out.values == 0.66)
        assert out.start_year == 1955 and out.end_year == 1989 + 2

    def test_degenerate_reduction(self):
        G = cyclical_gdp()
        p = LfpSimParams(A1=420.0, B1=1.0, C1=0.0, alpha=0.0, LFP0=0.6, t0=1955, T=2)
        out = simulate_lfp(G, p)
        rel = np.diff(out.values) / out.values[:-1]
        driver = excess_growth(G, 420.0)
        expected = driver.window(1955 + 1 - 2, G.end_year).values
        np.testing.assert_allclose(rel, expected, rtol=1e-12, atol=1e-15)

    def test_single_step_pulse(self):
        # excess growth of 0.01 in 1961 only: G rises 420 + 0.01*G
        g = [10_000.0, 10_420.0]
        g.append(g[-1] + 420.0 + 0.01 * g[-1])
        for _ in range(4):
            g.append(g[-1] + 420.0)
        G = AnnualSeries(1959, g)
        assert excess_growth(G, 420.0)[1961] == pytest.approx(0.01, rel=1e-12)
        p = LfpSimParams(A1=420.0, B1=-5.0, C1=0.0, alpha=5.0, LFP0=0.65, t0=1960, T=0)
        out = simulate_lfp(G, p)
        rel = growth_rate(out)
        assert rel[1961] == pytest.approx(-0.002, rel=1e-12)
        assert rel[1960 + 2] == 0.0

    def test_out_of_range_is_reported_not_clamped(self, caplog):
        G = linear_gdp(step=2000.0)
        p = LfpSimParams(A1=100.0, B1=0.2, C1=0.0, alpha=0.0, LFP0=0.9, t0=1955, T=0)
        out = simulate_lfp(G, p)
        assert out.values.max() > 1
        assert out_of_range_years(out)
        assert "leaves" in caplog.text

    def test_deterministic(self):
        G = cyclical_gdp(seed=3)
        p = LfpSimParams(A1=420.0, B1=-5.0, C1=0.01, alpha=5.0, LFP0=0.6, t0=1955, T=2)
        assert simulate_lfp(G, p).values.tobytes() == simulate_lfp(G, p).values.tobytes()


class TestCheckParams:
    def test_us_flagged(self):
        c = check_params(COUNTRY_PRESETS["us"])
        assert c.steady_state == pytest.approx(4.5e6 / 3.5e6 - 0.095, rel=1e-15)
        assert c.steady_state == pytest.approx(1.19, abs=5e-3)
        assert not c.ok

    @pytest.mark.parametrize("name, rate", [("france", 0.054), ("canada", 0.023625), ("italy", 0.096)])
    def test_published_sets_pass(self, name, rate):
        c = check_params(COUNTRY_PRESETS[name])
        assert c.ok
        assert c.steady_state == pytest.approx(rate, abs=1e-12)

