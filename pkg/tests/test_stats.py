import logging
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import beta as beta_fn
from scipy.special import gamma as gamma_fn

from polarscore.errors import InputError
from polarscore.stats import (
    FOLLOWER_LEVELS,
    _t_critical,
    aggregate_polarity,
    category_medians,
    follower_quartiles,
    fourth_quartile_cohort_fraction,
    group_confidence_intervals,
    ols_regression,
    one_way_anova,
    retweet_rate_comparison,
    welch_pairwise,
)


def f_sf_by_quadrature(f, d1, d2):
    """Tail of the F distribution integrated numerically; independent oracle."""
    def density(x):
        num = (d1 * x) ** d1 * d2**d2
        den = (d1 * x + d2) ** (d1 + d2)
        return math.sqrt(num / den) / (x * beta_fn(d1 / 2, d2 / 2))

    val, _ = quad(density, f, np.inf)
    return val


def t_sf_two_sided_by_quadrature(t, df):
    def density(x):
        c = gamma_fn((df + 1) / 2) / (math.sqrt(df * math.pi) * gamma_fn(df / 2))
        return c * (1 + x * x / df) ** (-(df + 1) / 2)

    val, _ = quad(density, abs(t), np.inf)
    return 2 * val


class TestAnova:
    def test_hand_fixture(self):
        result = one_way_anova([[1, 2, 3], [4, 5, 6]])
        assert result.f == pytest.approx(13.5, abs=1e-12)
        assert (result.df_between, result.df_within) == (1, 4)
        assert result.ms_within == pytest.approx(1.0)
        assert result.group_means == [2.0, 5.0]
        assert result.group_sizes == [3, 3]

    def test_p_value_against_quadrature(self):
        result = one_way_anova([[1, 2, 3], [4, 5, 6]])
        assert result.p == pytest.approx(f_sf_by_quadrature(13.5, 1, 4), rel=1e-8)
        three = one_way_anova([[1.0, 2.0], [1.5, 2.5], [5.0, 6.0]])
        assert three.p == pytest.approx(
            f_sf_by_quadrature(three.f, 2, 3), rel=1e-8)

    def test_degenerate_variance(self):
        same_means = one_way_anova([[2, 2], [2, 2]])
        assert same_means.f == 0.0 and same_means.p == 1.0
        apart = one_way_anova([[1, 1], [2, 2]])
        assert apart.f == np.inf and apart.p == 0.0

    def test_validation(self):
        with pytest.raises(InputError, match=">= 2 groups"):
            one_way_anova([[1, 2, 3]])
        with pytest.raises(InputError, match="< 2 observations"):
            one_way_anova([[1, 2], [7]])

    def test_confidence_intervals(self):
        result = one_way_anova([[1, 2, 3], [4, 5, 6]])
        (lo1, hi1), (lo2, hi2) = group_confidence_intervals(result)
        half = 2.7764451052 * math.sqrt(1 / 3)
        assert lo1 == pytest.approx(2.0 - half, abs=1e-6)
        assert hi1 == pytest.approx(2.0 + half, abs=1e-6)
        assert (lo2 + hi2) / 2 == pytest.approx(5.0)

    def test_t_critical_reference_values(self):
        assert _t_critical(4, 0.05) == pytest.approx(2.7764451052, abs=1e-8)
        assert _t_critical(10, 0.05) == pytest.approx(2.2281388520, abs=1e-8)

    def test_textbook_three_groups(self):
        # recorded once from an external statistics package
        result = one_way_anova([[6, 8, 4, 5, 3, 4],
                                [8, 12, 9, 11, 6, 8],
                                [13, 9, 11, 8, 7, 12]])
        assert result.f == pytest.approx(9.264705882352942, abs=1e-6)
        assert result.p == pytest.approx(0.0023987773293929083, abs=1e-9)

    def test_shift_and_scale_invariance(self, rng):
        groups = [list(rng.normal(m, 1.0, 12)) for m in (0.0, 0.5, 2.0)]
        base = one_way_anova(groups).f
        shifted = one_way_anova([[x + 100.0 for x in g] for g in groups]).f
        scaled = one_way_anova([[x * -3.5 for x in g] for g in groups]).f
        assert shifted == pytest.approx(base, rel=1e-9)
        assert scaled == pytest.approx(base, rel=1e-9)


class TestWelch:
    def test_hand_case(self):
        out = welch_pairwise({"a": [1, 2, 3, 4], "b": [2, 4, 6, 8]})
        assert len(out) == 1
        cmp = out[0]
        assert cmp.t == pytest.approx(-2.5 / math.sqrt(25 / 12))
        assert cmp.df == pytest.approx(1875 / 425)
        assert cmp.p_raw == pytest.approx(
            t_sf_two_sided_by_quadrature(cmp.t, cmp.df), rel=1e-7)
        assert cmp.p_adjusted == cmp.p_raw  # single pair: no correction

    def test_bonferroni_scales_with_pairs(self):
        groups = {"a": [1.0, 1.1], "b": [1.05, 1.2], "c": [5.0, 5.1]}
        out = welch_pairwise(groups)
        assert len(out) == 3
        for cmp in out:
            assert cmp.p_adjusted == pytest.approx(min(1.0, cmp.p_raw * 3))
        ab = next(c for c in out if (c.group_a, c.group_b) == ("a", "b"))
        assert not ab.significant

    def test_identical_groups(self):
        out = welch_pairwise({"a": [3, 3], "b": [3, 3]})
        assert out[0].t == 0.0 and out[0].p_raw == 1.0
        out = welch_pairwise({"a": [3, 3], "b": [4, 4]})
        assert out[0].t == np.inf and out[0].p_raw == 0.0

    def test_validation(self):
        with pytest.raises(InputError, match=">= 2 groups"):
            welch_pairwise({"a": [1, 2]})
        with pytest.raises(InputError, match=">= 2 observations"):
            welch_pairwise({"a": [1], "b": [1, 2]})


class TestOls:
    def test_exact_noiseless_fit(self):
        x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        w = np.array([1.0, -1.0, 2.0, 0.5, 0.0])
        y = 3.0 + 2.0 * x - 1.0 * w
        result = ols_regression(y, {"x": x, "w": w})
        assert result.coefficient("intercept") == pytest.approx(3.0, abs=1e-10)
        assert result.coefficient("x") == pytest.approx(2.0, abs=1e-10)
        assert result.coefficient("w") == pytest.approx(-1.0, abs=1e-10)
        assert result.r_squared == pytest.approx(1.0, abs=1e-12)
        assert result.p_value("x") == 0.0  # zero residual variance

    def test_matches_lstsq_and_closed_form_se(self, rng):
        n = 60
        x1 = rng.normal(size=n)
        x2 = rng.normal(size=n)
        y = 1.0 + 0.5 * x1 - 2.0 * x2 + rng.normal(0, 0.3, n)
        result = ols_regression(y, {"x1": x1, "x2": x2})

        X = np.column_stack([np.ones(n), x1, x2])
        beta, *_ = np.linalg.lstsq(X, y, rcond=None)
        np.testing.assert_allclose(result.coefficients, beta, atol=1e-10)

        resid = y - X @ beta
        sigma2 = resid @ resid / (n - 3)
        se = np.sqrt(sigma2 * np.diag(np.linalg.inv(X.T @ X)))
        np.testing.assert_allclose(result.standard_errors, se, atol=1e-10)

        t1 = result.t_values[1]
        assert result.p_values[1] == pytest.approx(
            t_sf_two_sided_by_quadrature(t1, n - 3), rel=1e-7)

    def test_residual_orthogonality(self, rng):
        n = 80
        x = rng.normal(size=n)
        y = 2 - x + rng.normal(0, 0.5, n)
        result = ols_regression(y, {"x": x})
        assert abs(result.residuals.sum()) < 1e-8
        assert abs(result.residuals @ x) < 1e-8

    def test_collinear_design_named(self):
        x = np.arange(6.0)
        with pytest.raises(InputError, match="x2"):
            ols_regression(np.ones(6), {"x1": x, "x2": 2 * x})

    def test_zero_column_dropped(self, caplog):
        x1 = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        y = 2.0 * x1
        with caplog.at_level(logging.INFO, logger="polarscore"):
            result = ols_regression(y, {"x1": x1, "x2": np.zeros(5)})
        assert result.names == ["intercept", "x1"]
        assert result.coefficient("x1") == pytest.approx(2.0, abs=1e-10)
        assert result.r_squared == pytest.approx(1.0, abs=1e-12)
        assert "identically-zero" in caplog.text

    def test_independent_noise_has_no_fit(self):
        gen = np.random.default_rng(12)
        y = gen.normal(size=120)
        x = gen.normal(size=120)
        result = ols_regression(y, {"x": x})
        assert result.r_squared < 0.05
        assert result.p_value("x") > 0.1

    def test_planted_model_recovered_within_two_se(self):
        gen = np.random.default_rng(3)
        n = 400
        pol = gen.uniform(0, 1, n)
        logfol = gen.normal(8, 1.5, n)
        y = 2.0 + 1.9 * pol + 0.8 * logfol + gen.normal(0, 0.3, n)
        result = ols_regression(y, {"polarity": pol, "log_followers": logfol})
        for name, planted in (("intercept", 2.0), ("polarity", 1.9),
                              ("log_followers", 0.8)):
            err = abs(result.coefficient(name) - planted)
            assert err <= 2 * result.standard_error(name)

    def test_constant_target_r_squared(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        result = ols_regression(np.full(4, 7.0), {"x": x})
        assert result.r_squared == 1.0

    def test_r_squared_in_unit_interval(self, rng):
        y = rng.normal(size=30)
        x = rng.normal(size=30)
        result = ols_regression(y, {"x": x})
        assert 0.0 <= result.r_squared <= 1.0
        # recompute independently from the residuals
        sst = ((y - y.mean()) ** 2).sum()
        ssr = result.residuals @ result.residuals
        assert result.r_squared == pytest.approx(1 - ssr / sst, abs=1e-12)

    def test_validation(self):
        with pytest.raises(InputError, match="length"):
            ols_regression([1, 2, 3], {"x": [1, 2]})
        with pytest.raises(InputError, match="more observations"):
            ols_regression([1, 2], {"x": [1, 2]})


class TestQuartiles:
    def test_balanced_counts(self, rng):
        followers = {f"u{i:04d}": int(v) for i, v in
                     enumerate(rng.permutation(np.arange(1, 1001)))}
        cats = follower_quartiles(followers)
        counts = {lvl: 0 for lvl in FOLLOWER_LEVELS}
        for lvl in cats.categories.values():
            counts[lvl] += 1
        for lvl in FOLLOWER_LEVELS:
            assert abs(counts[lvl] - 250) <= 1

    def test_boundary_goes_low(self):
        cats = follower_quartiles({"a": 1, "b": 1, "c": 2, "d": 3, "e": 4})
        assert cats.categories["a"] == "VeryLow"
        assert cats.categories["c"] == "Low"
        assert cats.categories["d"] == "Medium"
        assert cats.categories["e"] == "High"
        assert cats.cut_points == (1.0, 2.0, 3.0)

    def test_forced_partition(self):
        cats = follower_quartiles({"a": 1, "b": 2, "c": 3, "d": 4})
        assert [cats.categories[u] for u in "abcd"] == list(FOLLOWER_LEVELS)

    def test_monotone_in_follower_count(self, rng):
        followers = {f"u{i}": int(v) for i, v in
                     enumerate(rng.integers(1, 10_000, size=60))}
        cats = follower_quartiles(followers)
        order = {lvl: i for i, lvl in enumerate(FOLLOWER_LEVELS)}
        pairs = sorted(followers.items(), key=lambda kv: kv[1])
        ranks = [order[cats.categories[u]] for u, _ in pairs]
        assert ranks == sorted(ranks)

    def test_degenerate_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="polarscore"):
            cats = follower_quartiles({u: 5 for u in "abcd"})
        assert "degenerate" in caplog.text
        assert set(cats.categories.values()) == {"VeryLow"}

    def test_too_few(self):
        with pytest.raises(InputError, match=">= 4"):
            follower_quartiles({"a": 1, "b": 2, "c": 3})


class TestRates:
    def test_strict_comparison_and_exclusions(self, caplog):
        event = {"u1": [10, 10, 30], "u2": [5], "u3": [4, 4]}
        other = {"u1": [10, 9], "u2": [5], "u4": [2]}
        with caplog.at_level(logging.INFO, logger="polarscore"):
            comparisons, excluded = retweet_rate_comparison(event, other)
        by_user = {c.user_id: c for c in comparisons}
        assert by_user["u1"].event_higher  # 10 > 9.5
        assert not by_user["u2"].event_higher  # ties lose under strict >
        assert excluded == 2  # u3 misses other, u4 misses event
        assert set(by_user) == {"u1", "u2"}

    def test_cohort_fraction(self):
        polarity = {f"u{i}": float(i) for i in range(8)}  # q3 = 5.25
        event = {f"u{i}": [3] for i in range(8)}
        other = {f"u{i}": [2 if i == 7 else 4] for i in range(8)}
        comparisons, _ = retweet_rate_comparison(event, other)
        frac, size = fourth_quartile_cohort_fraction(comparisons, polarity)
        assert size == 2  # u6 and u7 sit strictly above q3
        assert frac == 0.5  # only u7 beats its off-event median

    def test_cohort_empty_polarity(self):
        with pytest.raises(InputError, match="empty polarity"):
            fourth_quartile_cohort_fraction([], {})

    def test_cohort_without_comparisons(self):
        frac, size = fourth_quartile_cohort_fraction([], {"a": 1.0, "b": 2.0})
        assert (frac, size) == (0.0, 0)


class TestCategoryMedians:
    def test_medians_and_omissions(self, caplog):
        categories = {"u1": "Journalist", "u2": "Journalist", "u3": "Sports",
                      "u4": "Writer"}
        r = {"u1": 0.5, "u2": -0.3, "u3": 0.2}
        c = {"u1": -0.4}
        counts = {"u1": 10, "u2": 20}
        with caplog.at_level(logging.INFO, logger="polarscore"):
            out = category_medians(categories, r, c, counts)
        j = out["Journalist"]
        assert j.median_retweet_polarity == pytest.approx(0.1)
        assert j.median_abs_content_polarity == pytest.approx(0.4)
        assert j.median_retweet_count == 15.0
        assert j.n == 2
        assert out["Sports"].median_abs_content_polarity is None
        assert "Writer" not in out
        assert "Writer" in caplog.text

    def test_membership_via_either_score(self):
        out = category_medians({"u1": "Sports"}, {}, {"u1": -0.9}, {})
        assert out["Sports"].n == 1
        assert out["Sports"].median_retweet_polarity is None
        assert out["Sports"].median_abs_content_polarity == pytest.approx(0.9)


class TestAggregatePolarity:
    def test_medians_across_events(self):
        r = {"e1": {"u1": 0.5, "u2": -0.2}, "e2": {"u1": -0.7}}
        c = {"e1": {"u2": 0.9}}
        out = aggregate_polarity(r, c)
        assert [a.user_id for a in out] == ["u1", "u2"]
        u1, u2 = out
        assert u1.median_abs_retweet_polarity == pytest.approx(0.6)
        assert u1.median_abs_content_polarity is None
        assert u1.events_covered == 2
        assert u2.median_abs_retweet_polarity == pytest.approx(0.2)
        assert u2.median_abs_content_polarity == pytest.approx(0.9)
        assert u2.events_covered == 1

    def test_odd_even_and_single_event_medians(self):
        r = {"e1": {"u": 0.4}, "e2": {"u": -0.6}, "e3": {"u": 0.8}}
        out = aggregate_polarity(r, {})
        assert out[0].median_abs_retweet_polarity == pytest.approx(0.6)

        single = aggregate_polarity({"e1": {"u": -0.3}}, {})
        assert single[0].median_abs_retweet_polarity == pytest.approx(0.3)

        even = {"e1": {"u": 0.1}, "e2": {"u": -0.2}, "e3": {"u": 0.3},
                "e4": {"u": -0.9}}
        out = aggregate_polarity(even, {})
        assert out[0].median_abs_retweet_polarity == pytest.approx(0.25)
        assert out[0].events_covered == 4

    def test_event_order_invariant(self):
        r = {"e1": {"u": 0.4}, "e2": {"u": -0.6}, "e3": {"u": 0.8}}
        flipped = {k: r[k] for k in reversed(list(r))}
        assert aggregate_polarity(r, {}) == aggregate_polarity(flipped, {})

    def test_empty(self):
        assert aggregate_polarity({}, {}) == []
