from __future__ import annotations

import math

import numpy as np
import pytest
import statsmodels.api as sm
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from entrorisk.data import (
    Dataset,
    RegimeCalendar,
    apply_window,
    business_days,
    generate_synthetic,
    rolling_windows,
    split_in_out,
)
from entrorisk.errors import EstimationError
from entrorisk.evaluation import (
    bootstrap_compare,
    bootstrap_r2,
    explanatory_power,
    mean_premiums,
    ols_fit,
    predictive_power,
    regime_evaluation,
    rolling_evaluation,
    welch_test,
)
from entrorisk.risk import MeasureConfig

BETA = MeasureConfig("beta", "beta")
STD = MeasureConfig("stddev", "stddev")

U10 = np.array([0.8, 1.1, 0.95, 1.3, 0.7, 1.05, 1.2, 0.9, 1.4, 0.6])
V10 = np.array([0.31, 0.42, 0.35, 0.55, 0.22, 0.40, 0.47, 0.30, 0.61, 0.25]) * 1e-3


def _closed_form_oracle(u, v):
    """Textbook least squares through normal equations, written out separately."""
    n = len(u)
    su, sv = sum(u), sum(v)
    suu = sum(x * x for x in u)
    suv = sum(x * y for x, y in zip(u, v))
    det = n * suu - su * su
    a1 = (n * suv - su * sv) / det
    a0 = (sv * suu - su * suv) / det
    fitted = [a0 + a1 * x for x in u]
    vbar = sv / n
    sse = sum((y - f) ** 2 for y, f in zip(v, fitted))
    sst = sum((y - vbar) ** 2 for y in v)
    s2 = sse / (n - 2)
    se1 = math.sqrt(n * s2 / det)
    se0 = math.sqrt(s2 * suu / det)
    p0 = 2 * stats.t.sf(abs(a0 / se0), n - 2)
    p1 = 2 * stats.t.sf(abs(a1 / se1), n - 2)
    return a0, a1, 1 - sse / sst, p0, p1


def _capm(n_sec=40, n_days=800, noise=0.0, seed=0, drift=0.0005):
    betas = np.linspace(0.4, 1.6, n_sec)
    return generate_synthetic(n_sec, n_days, betas, 0.01, np.full(n_sec, noise), drift, seed=seed)


class TestOLS:
    def test_perfect_fit(self):
        u = np.arange(6.0)
        f = ols_fit(u, 2 * u + 1)
        assert f.a0 == pytest.approx(1.0, abs=1e-12)
        assert f.a1 == pytest.approx(2.0, abs=1e-12)
        assert f.r_squared == 1.0

    def test_constant_target(self):
        f = ols_fit(np.arange(5.0), np.full(5, 0.3))
        assert f.a1 == 0.0
        assert f.r_squared == 0.0
        assert f.p_a1 == 1.0

    def test_ten_point_closed_form(self):
        f = ols_fit(U10, V10)
        a0, a1, r2, p0, p1 = _closed_form_oracle(U10.tolist(), V10.tolist())
        np.testing.assert_allclose([f.a0, f.a1, f.r_squared, f.p_a0, f.p_a1], [a0, a1, r2, p0, p1], rtol=0, atol=1e-12)

    def test_ten_point_statsmodels(self):
        f = ols_fit(U10, V10)
        res = sm.OLS(V10, sm.add_constant(U10)).fit()
        np.testing.assert_allclose([f.a0, f.a1], res.params, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(f.r_squared, res.rsquared, atol=1e-12)
        np.testing.assert_allclose([f.p_a0, f.p_a1], res.pvalues, atol=1e-12)
        np.testing.assert_allclose([f.se_a0, f.se_a1], res.bse, rtol=1e-10)

    def test_constant_u(self):
        with pytest.raises(EstimationError, match="constant explanatory variable"):
            ols_fit(np.ones(5), np.arange(5.0))

    def test_length_mismatch(self):
        with pytest.raises(EstimationError, match="length mismatch"):
            ols_fit(np.arange(4.0), np.arange(5.0))

    def test_too_few(self):
        with pytest.raises(EstimationError):
            ols_fit([0.0, 1.0], [1.0, 2.0])

    @given(st.integers(0, 10_000), st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-3), st.floats(-1e3, 1e3))
    @settings(max_examples=60, deadline=None)
    def test_affine_invariance(self, seed, a, b):
        rng = np.random.default_rng(seed)
        u = rng.normal(size=30)
        v = 0.5 * u + rng.normal(size=30)
        assert abs(ols_fit(a * u + b, v).r_squared - ols_fit(u, v).r_squared) <= 1e-12

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_permutation_invariance_and_range(self, seed):
        rng = np.random.default_rng(seed)
        u, v = rng.normal(size=25), rng.normal(size=25)
        perm = rng.permutation(25)
        f = ols_fit(u, v)
        assert 0 <= f.r_squared <= 1
        assert 0 <= f.p_a0 <= 1 and 0 <= f.p_a1 <= 1
        assert ols_fit(u[perm], v[perm]).r_squared == pytest.approx(f.r_squared, abs=1e-12)


class TestExplanatoryPower:
    def test_exact_capm(self):
        rep = explanatory_power(_capm(), [BETA, STD])
        assert abs(rep.eta["beta"] - 1.0) <= 1e-9
        assert rep.sample == "full" and rep.direction == "in"
        assert rep.eta["beta"] == rep.fits["beta"].r_squared

    def test_identical_securities(self):
        x = np.random.default_rng(1).normal(0, 0.01, 100)
        d = Dataset.from_arrays(["A", "B", "C"], business_days("2000-01-03", 100), [x, x, x], x, np.zeros(100))
        with pytest.raises(EstimationError, match="constant explanatory variable"):
            explanatory_power(d)

    def test_noise_attenuation(self):
        etas = [explanatory_power(_capm(60, 1500, s, seed=3), BETA).eta["beta"] for s in (0.002, 0.01, 0.04)]
        assert etas[0] > etas[1] > etas[2]

    def test_two_securities(self):
        d = _capm(2)
        with pytest.raises(EstimationError, match="need >= 3 securities"):
            explanatory_power(d)

    def test_rows_contract(self):
        rows = explanatory_power(_capm(), [BETA]).rows()
        assert set(rows[0]) == {"measure", "sample", "direction", "eta", "a0", "a1", "p_a0", "p_a1", "n"}


class TestPredictivePower:
    def test_degenerate_split(self, factor_panel):
        d, _ = factor_panel
        a = explanatory_power(d)
        b = predictive_power(d, d)
        assert a.eta == b.eta

    def test_stationary(self):
        # the gap is random through each half's realised market mean, so judge it over many panels
        gaps = []
        for seed in range(20):
            d = generate_synthetic(150, 2520, np.linspace(0.5, 1.5, 150), 0.01, np.full(150, 0.002), 0.001, seed=seed)
            d_in, d_out = split_in_out(d, 1260)
            gaps.append(abs(predictive_power(d_in, d_out, BETA).eta["beta"] - explanatory_power(d_in, BETA).eta["beta"]))
        gaps = np.array(gaps)
        assert np.mean(gaps <= 0.1) >= 0.8
        assert np.median(gaps) < 0.05

    def test_shuffled_targets_match_null(self, factor_panel):
        d, _ = factor_panel
        d_in, d_out = split_in_out(d, 1000)
        rng = np.random.default_rng(4)
        shuffled = Dataset.from_arrays(
            d_out.ids, d_out.dates, d_out.returns_matrix[rng.permutation(150)], d_out.market.returns, d_out.risk_free.returns
        )
        eta = predictive_power(d_in, shuffled, BETA).eta["beta"]
        from entrorisk.risk import risk_values

        u = risk_values(d_in.premium_matrix, BETA, d_in.market_premium)
        v = mean_premiums(shuffled)
        null = [ols_fit(u, v[rng.permutation(150)]).r_squared for _ in range(500)]
        assert eta < np.quantile(null, 0.95)

    def test_security_mismatch(self, factor_panel):
        d, _ = factor_panel
        with pytest.raises(EstimationError, match="differ"):
            predictive_power(d, Dataset(d.securities[:-1], d.market, d.risk_free))


class TestRolling:
    def test_single_window(self):
        d = generate_synthetic(20, 2600, np.linspace(0.5, 1.5, 20), 0.01, np.full(20, 0.01), 0.0005, seed=2, start="2000-01-03")
        w = rolling_windows(d)
        assert len(w) == 1
        rep = rolling_evaluation(d, w, [BETA, STD])
        s = rep.summary()
        assert s["in"]["beta"]["mean"] == rep.in_reports[0].eta["beta"]
        assert s["in"]["beta"]["rel_std"] == 0.0
        assert s["out"]["stddev"]["rel_std"] == 0.0

    def test_matches_direct_calls(self):
        d = generate_synthetic(20, 3200, np.linspace(0.5, 1.5, 20), 0.01, np.full(20, 0.01), 0.0005, seed=3, start="2000-01-03")
        w = rolling_windows(d)
        rep = rolling_evaluation(d, w, [BETA])
        for win, ri, ro in zip(w, rep.in_reports, rep.out_reports):
            d_in, d_out = apply_window(d, win)
            assert ri.eta == explanatory_power(d_in, BETA).eta
            assert ro.eta == predictive_power(d_in, d_out, BETA).eta
        etas = rep.eta("in")["beta"]
        s = rep.summary()["in"]["beta"]
        assert s["mean"] == pytest.approx(etas.mean(), abs=1e-12)
        assert s["rel_std"] == pytest.approx(etas.std(ddof=1) / etas.mean(), abs=1e-12)

    def test_workers(self):
        d = generate_synthetic(20, 3200, np.linspace(0.5, 1.5, 20), 0.01, np.full(20, 0.01), 0.0005, seed=3)
        w = rolling_windows(d)
        a = rolling_evaluation(d, w, workers=1)
        b = rolling_evaluation(d, w, workers=3)
        assert a.summary() == b.summary()

    def test_no_windows(self, factor_panel):
        with pytest.raises(ValueError):
            rolling_evaluation(factor_panel[0], [])


class TestWelch:
    def test_matches_scipy(self):
        rng = np.random.default_rng(5)
        a, b = rng.normal(0.3, 0.05, 200), rng.normal(0.31, 0.1, 150)
        c = welch_test(a, b, "a", "b")
        ref = stats.ttest_ind(a, b, equal_var=False)
        assert c.t == ref.statistic and c.p == ref.pvalue

    def test_welch_satterthwaite_df(self):
        rng = np.random.default_rng(6)
        a, b = rng.normal(size=40), rng.normal(0, 3, size=70)
        va, vb = a.var(ddof=1) / 40, b.var(ddof=1) / 70
        df = (va + vb) ** 2 / (va**2 / 39 + vb**2 / 69)
        assert welch_test(a, b).df == pytest.approx(df, rel=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_antisymmetric(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=30), rng.normal(0.2, 2, size=30)
        assert welch_test(a, b).t == -welch_test(b, a).t

    def test_degenerate(self):
        c = welch_test(np.full(10, 0.4), np.full(10, 0.5))
        assert c.degenerate and c.t is None and c.significance == "none"

    def test_levels(self):
        a = np.random.default_rng(7).normal(0, 1, 500)
        assert welch_test(a, a[::-1]).significance == "none"
        assert welch_test(a + 1.0, a).significance == "1%"
        assert welch_test(a + 0.15, a).significance == "5%"
        assert welch_test(a + 0.11, a).significance == "10%"


class TestBootstrap:
    def test_shape_and_pairs(self, factor_panel):
        d, _ = factor_panel
        rep = bootstrap_compare(d, iterations=200, drop_count=25, seed=3)
        assert set(rep.samples) == {"stddev", "beta", "entropy_shannon", "entropy_renyi"}
        assert all(s.shape == (200,) for s in rep.samples.values())
        assert all(((s >= 0) & (s <= 1)).all() for s in rep.samples.values())
        assert len(rep.comparisons) == 6
        pairs = {(c.measure_a, c.measure_b) for c in rep.comparisons}
        for ent in ("entropy_shannon", "entropy_renyi"):
            for base in ("stddev", "beta"):
                assert (ent, base) in pairs
        assert rep.drop_sets.shape == (200, 25)
        assert all(len(set(row)) == 25 for row in rep.drop_sets)

    def test_iteration_matches_direct_fit(self, factor_panel):
        d, _ = factor_panel
        rep = bootstrap_compare(d, [BETA], iterations=5, drop_count=10, seed=1)
        from entrorisk.risk import risk_values

        u = risk_values(d.premium_matrix, BETA, d.market_premium)
        v = mean_premiums(d)
        keep = np.setdiff1d(np.arange(150), rep.drop_sets[3])
        assert rep.samples["beta"][3] == ols_fit(u[keep], v[keep]).r_squared

    def test_deterministic_across_workers(self, factor_panel):
        d, _ = factor_panel
        a = bootstrap_compare(d, iterations=300, seed=9, workers=1)
        b = bootstrap_compare(d, iterations=300, seed=9, workers=4)
        for k in a.samples:
            np.testing.assert_array_equal(a.samples[k], b.samples[k])
        assert a.comparisons == b.comparisons

    def test_identical_configs(self, factor_panel):
        d, _ = factor_panel
        rep = bootstrap_compare(d, [STD, MeasureConfig("stddev_copy", "stddev")], iterations=200, seed=2)
        c = rep.comparisons[0]
        assert abs(c.t) < 1e-9 and c.significance == "none"

    def test_drop_zero_is_degenerate(self, factor_panel):
        d, _ = factor_panel
        rep = bootstrap_compare(d, [STD, BETA], iterations=20, drop_count=0)
        assert rep.comparisons[0].degenerate
        assert np.ptp(rep.samples["beta"]) == 0

    def test_drop_too_many(self, factor_panel):
        d, _ = factor_panel
        with pytest.raises(EstimationError, match="drop count"):
            bootstrap_compare(d, [STD], iterations=2, drop_count=148)

    def test_planted_effect(self):
        rng = np.random.default_rng(10)
        clean = rng.uniform(0.5, 1.5, 150)
        target = 0.001 * clean + rng.normal(0, 0.0002, 150)
        noisy = clean + rng.normal(0, 1.0, 150)
        rep = bootstrap_r2({"noisy": noisy, "clean": clean}, target, iterations=1000, seed=4)
        c = rep.comparisons[0]
        assert (c.measure_a, c.measure_b) == ("clean", "noisy")
        assert c.t > 0 and c.significance == "1%"

    def test_out_of_sample_direction(self, factor_panel):
        d, _ = factor_panel
        d_in, d_out = split_in_out(d, 1000)
        rep = bootstrap_compare(d_in, [BETA, STD], iterations=50, seed=1, d_out=d_out, sample="w")
        assert rep.direction == "out" and rep.sample == "w"


class TestRegimes:
    def test_all_bull(self, factor_panel):
        d, _ = factor_panel
        cal = RegimeCalendar([(d.dates[0], d.dates[-1], "bull")])
        from entrorisk.data import filter_by_regime
        from entrorisk.errors import DataError

        bull = explanatory_power(filter_by_regime(d, cal, "bull"), sample="bull")
        assert bull.eta == explanatory_power(d).eta
        with pytest.raises(DataError, match="empty regime sample"):
            regime_evaluation(d, cal)

    def test_sign_planted(self):
        n_days = 2000
        drift = np.where(np.arange(n_days) < 1000, 0.002, -0.002)
        betas = np.linspace(0.5, 1.5, 60)
        d = generate_synthetic(60, n_days, betas, 0.01, 0.01 * betas, drift, seed=5)
        cal = RegimeCalendar(
            [(d.dates[0], d.dates[999], "bull"), (d.dates[1000], d.dates[-1], "bear")]
        )
        bull, bear = regime_evaluation(d, cal)
        assert (bull.sample, bear.sample) == ("bull", "bear")
        for m in ("stddev", "beta", "entropy_shannon", "entropy_renyi"):
            assert bull.fits[m].a1 > 0
            assert bear.fits[m].a1 < 0
        assert bull.fits["stddev"].n_points == 60
