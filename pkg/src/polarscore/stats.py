"""Downstream statistics: aggregate polarity, follower quartiles, one-way
ANOVA with Welch post-hoc tests, OLS regression, retweet-rate comparison, and
per-category medians.

Test statistics are computed from first principles; tail probabilities go
through the regularized incomplete beta function.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaincinv

from .errors import InputError

logger = logging.getLogger("polarscore")

FOLLOWER_LEVELS = ("VeryLow", "Low", "Medium", "High")


def _median(values) -> float:
    return float(np.median(np.asarray(values, dtype=np.float64)))


def _f_sf(f: float, d1: int, d2: int) -> float:
    """P(F >= f) for the F distribution, via the incomplete beta function."""
    if f <= 0:
        return 1.0
    if not np.isfinite(f):
        return 0.0
    x = d2 / (d2 + d1 * f)
    return float(betainc(d2 / 2.0, d1 / 2.0, x))


def _t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided p-value for a t statistic."""
    if t == 0.0:
        return 1.0
    if not np.isfinite(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def _t_critical(df: float, alpha: float) -> float:
    """Two-sided critical value: |T| exceeds it with probability alpha."""
    x = float(betaincinv(df / 2.0, 0.5, alpha))
    return float(np.sqrt(df * (1.0 - x) / x))


@dataclass
class AggregatePolarity:
    user_id: str
    median_abs_retweet_polarity: float | None
    median_abs_content_polarity: float | None
    events_covered: int


def aggregate_polarity(
    retweet_scores: dict[str, dict[str, float]],
    content_scores: dict[str, dict[str, float]],
) -> list[AggregatePolarity]:
    """Per-user medians of absolute polarity across the events scoring them.

    Inputs are event -> user -> score maps. A user appears once scored in any
    event; a metric missing everywhere for the user reports None.
    """
    r_by_user: dict[str, list[float]] = {}
    c_by_user: dict[str, list[float]] = {}
    events_by_user: dict[str, set[str]] = {}
    for event, scores in retweet_scores.items():
        for u, s in scores.items():
            r_by_user.setdefault(u, []).append(abs(s))
            events_by_user.setdefault(u, set()).add(event)
    for event, scores in content_scores.items():
        for u, s in scores.items():
            c_by_user.setdefault(u, []).append(abs(s))
            events_by_user.setdefault(u, set()).add(event)
    out = []
    for u in sorted(events_by_user):
        out.append(AggregatePolarity(
            user_id=u,
            median_abs_retweet_polarity=_median(r_by_user[u]) if u in r_by_user else None,
            median_abs_content_polarity=_median(c_by_user[u]) if u in c_by_user else None,
            events_covered=len(events_by_user[u]),
        ))
    return out


@dataclass
class FollowerCategory:
    categories: dict[str, str]  # user_id -> level
    cut_points: tuple[float, float, float]


def follower_quartiles(followers: dict[str, int]) -> FollowerCategory:
    """Quartile follower-count categories; boundary counts fall to the lower level."""
    if len(followers) < 4:
        raise InputError(f"stats: quartiles need >= 4 influencers, got {len(followers)}")
    counts = np.asarray(list(followers.values()), dtype=np.float64)
    q1, q2, q3 = np.quantile(counts, [0.25, 0.5, 0.75])
    if q1 == q3:
        logger.warning("stats: degenerate follower quartiles (q1 == q3 == %g)", q1)
    categories = {}
    for u, c in followers.items():
        if c <= q1:
            categories[u] = "VeryLow"
        elif c <= q2:
            categories[u] = "Low"
        elif c <= q3:
            categories[u] = "Medium"
        else:
            categories[u] = "High"
    return FollowerCategory(categories=categories,
                            cut_points=(float(q1), float(q2), float(q3)))


@dataclass
class AnovaResult:
    f: float
    p: float
    df_between: int
    df_within: int
    ms_within: float
    group_means: list[float]
    group_sizes: list[int]


def one_way_anova(groups: list) -> AnovaResult:
    """F statistic and p-value for equality of group means.

    With zero within-group variance the statistic is defined as 0 when means
    agree and infinity when they do not.
    """
    if len(groups) < 2:
        raise InputError("stats: ANOVA needs >= 2 groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    for i, a in enumerate(arrays):
        if a.size < 2:
            raise InputError(f"stats: ANOVA group {i} has {a.size} < 2 observations")
    total_n = sum(a.size for a in arrays)
    grand = sum(a.sum() for a in arrays) / total_n
    ssb = sum(a.size * (a.mean() - grand) ** 2 for a in arrays)
    ssw = sum(((a - a.mean()) ** 2).sum() for a in arrays)
    d1 = len(arrays) - 1
    d2 = total_n - len(arrays)
    msb = ssb / d1
    msw = ssw / d2
    if msw == 0.0:
        f = 0.0 if msb == 0.0 else np.inf
    else:
        f = msb / msw
    return AnovaResult(f=float(f), p=_f_sf(f, d1, d2), df_between=d1, df_within=d2,
                       ms_within=float(msw),
                       group_means=[float(a.mean()) for a in arrays],
                       group_sizes=[int(a.size) for a in arrays])


def group_confidence_intervals(result: AnovaResult, level: float = 0.95):
    """Group mean +- t * pooled SE intervals; one (low, high) pair per group."""
    t = _t_critical(result.df_within, 1.0 - level)
    out = []
    for mean, n in zip(result.group_means, result.group_sizes):
        half = t * np.sqrt(result.ms_within / n)
        out.append((mean - half, mean + half))
    return out


@dataclass
class WelchComparison:
    group_a: str
    group_b: str
    t: float
    df: float
    p_raw: float
    p_adjusted: float
    significant: bool


def welch_pairwise(groups: dict[str, list], alpha: float = 0.05) -> list[WelchComparison]:
    """All-pairs Welch t-tests with Bonferroni correction.

    Used in place of Tukey HSD for post-hoc comparisons; the adjustment is
    named in the output so readers know which one ran.
    """
    names = sorted(groups)
    if len(names) < 2:
        raise InputError("stats: pairwise tests need >= 2 groups")
    n_pairs = len(names) * (len(names) - 1) // 2
    out = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            xa = np.asarray(groups[a], dtype=np.float64)
            xb = np.asarray(groups[b], dtype=np.float64)
            if xa.size < 2 or xb.size < 2:
                raise InputError(f"stats: Welch test needs >= 2 observations in {a} and {b}")
            va, vb = xa.var(ddof=1), xb.var(ddof=1)
            se2 = va / xa.size + vb / xb.size
            if se2 == 0.0:
                t = 0.0 if xa.mean() == xb.mean() else np.inf
                df = float(xa.size + xb.size - 2)
            else:
                t = (xa.mean() - xb.mean()) / np.sqrt(se2)
                df = se2**2 / (
                    (va / xa.size) ** 2 / (xa.size - 1)
                    + (vb / xb.size) ** 2 / (xb.size - 1)
                )
            p = _t_sf_two_sided(float(t), df)
            p_adj = min(1.0, p * n_pairs)
            out.append(WelchComparison(group_a=a, group_b=b, t=float(t), df=float(df),
                                       p_raw=p, p_adjusted=p_adj,
                                       significant=p_adj < alpha))
    return out


@dataclass
class RegressionResult:
    names: list[str]  # including "intercept" first
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    r_squared: float
    n: int
    residuals: np.ndarray

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def standard_error(self, name: str) -> float:
        return float(self.standard_errors[self.names.index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self.names.index(name)])


def _independent_columns(X: np.ndarray, names: list[str]) -> list[str]:
    """Names of columns that are linear combinations of earlier ones."""
    dependent = []
    kept = np.empty((X.shape[0], 0))
    for j, name in enumerate(names):
        trial = np.hstack([kept, X[:, j:j + 1]])
        if np.linalg.matrix_rank(trial) == trial.shape[1]:
            kept = trial
        else:
            dependent.append(name)
    return dependent


def ols_regression(y, predictors: dict[str, list]) -> RegressionResult:
    """Ordinary least squares with intercept via the normal equations.

    Standard errors come from the residual variance times the inverse Gram
    diagonal; p-values are two-sided t tests. Identically-zero predictors are
    dropped with a note; any other rank deficiency is fatal, naming the
    dependent columns.
    """
    y = np.asarray(y, dtype=np.float64)
    names = ["intercept"] + list(predictors)
    cols = [np.ones(y.size)] + [np.asarray(predictors[k], dtype=np.float64)
                                for k in predictors]
    for name, col in zip(names, cols):
        if col.size != y.size:
            raise InputError(f"stats: predictor {name} length {col.size} != n={y.size}")
    zero = [name for name, col in zip(names[1:], cols[1:]) if not col.any()]
    if zero:
        logger.info("stats: dropping identically-zero predictors: %s",
                    ", ".join(zero))
        keep = [(n, c) for n, c in zip(names, cols) if n not in zero]
        names = [n for n, _ in keep]
        cols = [c for _, c in keep]
    X = np.column_stack(cols)
    n, p = X.shape
    if n <= p:
        raise InputError(f"stats: need more observations than predictors (n={n}, p={p})")
    if np.linalg.matrix_rank(X) < p:
        bad = _independent_columns(X, names)
        raise InputError(f"stats: singular design matrix; collinear columns: {bad}")

    xtx = X.T @ X
    beta = np.linalg.solve(xtx, X.T @ y)
    residuals = y - X @ beta
    ssr = float(residuals @ residuals)
    df = n - p
    sigma2 = ssr / df
    se = np.sqrt(sigma2 * np.diag(np.linalg.inv(xtx)))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.where(beta == 0, 0.0, np.inf))
    pvals = np.array([_t_sf_two_sided(float(ti), df) for ti in t])
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0.0:
        r2 = 1.0 if ssr <= 1e-12 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    return RegressionResult(names=names, coefficients=beta, standard_errors=se,
                            t_values=t, p_values=pvals, r_squared=r2, n=n,
                            residuals=residuals)


@dataclass
class RateComparison:
    user_id: str
    median_event_rate: float
    median_other_rate: float
    event_higher: bool


def retweet_rate_comparison(
    event_counts: dict[str, list[int]],
    other_counts: dict[str, list[int]],
) -> tuple[list[RateComparison], int]:
    """Median retweet rate on event tweets vs the user's other tweets.

    The flag is a strict comparison. Users missing either split are excluded;
    the exclusion count is returned.
    """
    comparisons = []
    excluded = 0
    for u in sorted(set(event_counts) | set(other_counts)):
        ev = event_counts.get(u) or []
        other = other_counts.get(u) or []
        if not ev or not other:
            excluded += 1
            continue
        me, mo = _median(ev), _median(other)
        comparisons.append(RateComparison(user_id=u, median_event_rate=me,
                                          median_other_rate=mo,
                                          event_higher=me > mo))
    if excluded:
        logger.info("stats: %d users lacked tweets in one split", excluded)
    return comparisons, excluded


def fourth_quartile_cohort_fraction(
    comparisons: list[RateComparison], polarity: dict[str, float]
) -> tuple[float, int]:
    """Fraction of flagged users among those with polarity above the third
    quartile; returns (fraction, cohort size)."""
    if not polarity:
        raise InputError("stats: empty polarity map for cohort selection")
    q3 = float(np.quantile(np.asarray(list(polarity.values())), 0.75))
    cohort = [c for c in comparisons
              if c.user_id in polarity and polarity[c.user_id] > q3]
    if not cohort:
        return 0.0, 0
    frac = sum(1 for c in cohort if c.event_higher) / len(cohort)
    return frac, len(cohort)


@dataclass
class CategoryMedians:
    category: str
    median_retweet_polarity: float | None  # signed r
    median_abs_content_polarity: float | None
    median_retweet_count: float | None
    n: int


def category_medians(
    categories: dict[str, str],
    r_scores: dict[str, float],
    c_scores: dict[str, float] | None = None,
    retweet_counts: dict[str, float] | None = None,
) -> dict[str, CategoryMedians]:
    """Per-category medians of signed retweet polarity, absolute content
    polarity, and retweet counts. Categories with no scored member are
    omitted and noted in the log."""
    c_scores = c_scores or {}
    retweet_counts = retweet_counts or {}
    members: dict[str, list[str]] = {}
    for u, cat in categories.items():
        if u in r_scores or u in c_scores:
            members.setdefault(cat, []).append(u)
    out = {}
    for cat in sorted(members):
        users = members[cat]
        rs = [r_scores[u] for u in users if u in r_scores]
        cs = [abs(c_scores[u]) for u in users if u in c_scores]
        rts = [retweet_counts[u] for u in users if u in retweet_counts]
        out[cat] = CategoryMedians(
            category=cat,
            median_retweet_polarity=_median(rs) if rs else None,
            median_abs_content_polarity=_median(cs) if cs else None,
            median_retweet_count=_median(rts) if rts else None,
            n=len(users),
        )
    skipped = set(categories.values()) - set(out)
    if skipped:
        logger.info("stats: categories with no scored members omitted: %s",
                    ", ".join(sorted(skipped)))
    return out
