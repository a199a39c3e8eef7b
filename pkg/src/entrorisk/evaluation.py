"""
Cross-sectional evaluation of risk measures.

Mean daily premiums of the securities are regressed on their estimated risk
by ordinary least squares; the R^2 of that regression is the explanatory
power of the measure.  Predictive power uses risks estimated on an earlier
sample against mean premiums of a later one.  :func:`bootstrap_compare`
tests whether two measures' R^2 differ, by repeatedly dropping random
securities and applying Welch's t-test to the resulting R^2 samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .data import Dataset, RegimeCalendar, WindowSplit, apply_window, filter_by_regime
from .errors import EstimationError
from .parallel import chunks, pmap, task_rng
from .risk import DEFAULT_MEASURES, MeasureConfig, risk_table

__all__ = [
    "RegressionFit",
    "EvaluationReport",
    "RollingReport",
    "Comparison",
    "BootstrapReport",
    "ols_fit",
    "welch_test",
    "explanatory_power",
    "predictive_power",
    "rolling_evaluation",
    "bootstrap_r2",
    "bootstrap_compare",
    "regime_evaluation",
    "mean_premiums",
]

MIN_SECURITIES = 3


@dataclass(frozen=True)
class RegressionFit:
    a0: float
    a1: float
    r_squared: float
    p_a0: float
    p_a1: float
    n_points: int
    se_a0: float = math.nan
    se_a1: float = math.nan


def _least_squares(u: np.ndarray, v: np.ndarray):
    """Intercept, slope, R^2, residual sum of squares and centred u moments."""
    ub, vb = u.mean(), v.mean()
    du, dv = u - ub, v - vb
    sxx = float(du @ du)
    if not sxx > 0:
        raise EstimationError("constant explanatory variable")
    a1 = float(du @ dv) / sxx
    a0 = float(vb - a1 * ub)
    resid = v - (a0 + a1 * u)
    sse = float(resid @ resid)
    sst = float(dv @ dv)
    r2 = 0.0 if sst == 0 else min(max(1.0 - sse / sst, 0.0), 1.0)
    return a0, a1, r2, sse, float(ub), sxx


def _p_value(coef: float, se: float, dof: int) -> float:
    if se == 0:
        return 1.0 if coef == 0 else 0.0
    return float(2.0 * stats.t.sf(abs(coef / se), dof))


def ols_fit(u, v) -> RegressionFit:
    """
    Fit ``v = a0 + a1 u`` by least squares.

    p-values are two-sided, from classical standard errors and a t
    distribution with ``n - 2`` degrees of freedom.
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise EstimationError(f"length mismatch: {u.size} vs {v.size}")
    n = u.size
    if n < 3:
        raise EstimationError(f"need at least 3 points, got {n}")
    a0, a1, r2, sse, ub, sxx = _least_squares(u, v)
    s2 = sse / (n - 2)
    se1 = math.sqrt(s2 / sxx)
    se0 = math.sqrt(s2 * (1.0 / n + ub * ub / sxx))
    return RegressionFit(
        a0, a1, r2, _p_value(a0, se0, n - 2), _p_value(a1, se1, n - 2), n, se0, se1
    )


@dataclass(frozen=True)
class EvaluationReport:
    """Regression of mean premium on risk, one fit per measure."""

    sample: str
    direction: str  # "in" or "out"
    fits: dict[str, RegressionFit]

    @property
    def eta(self) -> dict[str, float]:
        return {k: f.r_squared for k, f in self.fits.items()}

    def rows(self) -> list[dict]:
        return [
            {
                "measure": name,
                "sample": self.sample,
                "direction": self.direction,
                "eta": f.r_squared,
                "a0": f.a0,
                "a1": f.a1,
                "p_a0": f.p_a0,
                "p_a1": f.p_a1,
                "n": f.n_points,
            }
            for name, f in self.fits.items()
        ]


def _configs(measure_configs) -> list[MeasureConfig]:
    if isinstance(measure_configs, MeasureConfig):
        return [measure_configs]
    return list(measure_configs)


def _check_cross_section(d: Dataset) -> None:
    if len(d.ids) < MIN_SECURITIES:
        raise EstimationError(
            f"need >= {MIN_SECURITIES} securities for cross-sectional regression, got {len(d.ids)}"
        )


def mean_premiums(d: Dataset) -> np.ndarray:
    """Arithmetic mean daily premium per security."""
    return d.premium_matrix.mean(axis=1)


def _fit_all(risks: Mapping[str, np.ndarray], target: np.ndarray) -> dict[str, RegressionFit]:
    return {name: ols_fit(u, target) for name, u in risks.items()}


def explanatory_power(
    d: Dataset, measure_configs=DEFAULT_MEASURES, sample: str = "full"
) -> EvaluationReport:
    """In-sample R^2 of mean premium on each measure's per-security risk."""
    _check_cross_section(d)
    risks = risk_table(d, _configs(measure_configs))
    return EvaluationReport(sample, "in", _fit_all(risks, mean_premiums(d)))


def predictive_power(
    d_in: Dataset, d_out: Dataset, measure_configs=DEFAULT_MEASURES, sample: str = "split"
) -> EvaluationReport:
    """R^2 of out-of-sample mean premium on risk estimated in-sample (regression refit)."""
    if d_in.ids != d_out.ids:
        raise EstimationError("in-sample and out-of-sample security sets differ")
    _check_cross_section(d_in)
    risks = risk_table(d_in, _configs(measure_configs))
    return EvaluationReport(sample, "out", _fit_all(risks, mean_premiums(d_out)))


@dataclass(frozen=True)
class RollingReport:
    windows: list[WindowSplit]
    in_reports: list[EvaluationReport]
    out_reports: list[EvaluationReport]

    @property
    def measures(self) -> list[str]:
        return list(self.in_reports[0].fits)

    def eta(self, direction: str) -> dict[str, np.ndarray]:
        reports = self.in_reports if direction == "in" else self.out_reports
        return {m: np.array([r.fits[m].r_squared for r in reports]) for m in self.measures}

    def summary(self) -> dict[str, dict[str, dict[str, float]]]:
        """Per direction and measure: arithmetic mean and relative standard deviation."""
        out = {}
        for direction in ("in", "out"):
            out[direction] = {}
            for m, x in self.eta(direction).items():
                mean = float(x.mean())
                sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
                out[direction][m] = {"mean": mean, "rel_std": sd / mean if mean else math.nan}
        return out


def rolling_evaluation(
    d: Dataset,
    windows: Sequence[WindowSplit],
    measure_configs=DEFAULT_MEASURES,
    workers: int = 1,
) -> RollingReport:
    """Explanatory power on each window's first part and predictive power on its second."""
    if not windows:
        raise ValueError("need at least one window")
    configs = _configs(measure_configs)

    def one(w: WindowSplit):
        d_in, d_out = apply_window(d, w)
        _check_cross_section(d_in)
        risks = risk_table(d_in, configs)
        return (
            EvaluationReport(w.label, "in", _fit_all(risks, mean_premiums(d_in))),
            EvaluationReport(w.label, "out", _fit_all(risks, mean_premiums(d_out))),
        )

    pairs = pmap(one, list(windows), workers)
    return RollingReport(list(windows), [p[0] for p in pairs], [p[1] for p in pairs])


# -- significance ----------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Welch test of ``mean(R^2_a) == mean(R^2_b)``; ``t > 0`` means ``a`` is higher."""

    measure_a: str
    measure_b: str
    t: float | None
    df: float | None
    p: float | None
    significance: str
    degenerate: bool = False


def _significance(p: float) -> str:
    for level, name in ((0.01, "1%"), (0.05, "5%"), (0.10, "10%")):
        if p < level:
            return name
    return "none"


def welch_test(a, b, name_a: str = "a", name_b: str = "b") -> Comparison:
    """
    Two-sided Welch t-test on two samples.

    Samples that are both constant make the statistic undefined; the
    comparison is then flagged ``degenerate`` with ``t``, ``df`` and ``p``
    set to ``None``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.ptp(a) == 0 and np.ptp(b) == 0:
        return Comparison(name_a, name_b, None, None, None, "none", degenerate=True)
    res = stats.ttest_ind(a, b, equal_var=False)
    t, p = float(res.statistic), float(res.pvalue)
    return Comparison(name_a, name_b, t, float(res.df), p, _significance(p))


@dataclass(frozen=True)
class BootstrapReport:
    iterations: int
    drop_count: int
    samples: dict[str, np.ndarray]
    comparisons: list[Comparison]
    drop_sets: np.ndarray = field(repr=False, default=None)
    sample: str = "full"
    direction: str = "in"


def _draw_drop_sets(n: int, drop_count: int, iterations: int, seed: int) -> np.ndarray:
    out = np.empty((iterations, drop_count), dtype=np.intp)
    for i in range(iterations):
        out[i] = np.sort(task_rng(seed, i).choice(n, size=drop_count, replace=False))
    return out


def bootstrap_r2(
    risks: Mapping[str, np.ndarray],
    targets,
    iterations: int = 1000,
    drop_count: int = 25,
    seed: int = 0,
    workers: int = 1,
    sample: str = "full",
    direction: str = "in",
) -> BootstrapReport:
    """
    R^2 distributions under random removal of ``drop_count`` securities.

    Every iteration removes the same securities for all measures.  Each pair
    of measures is compared with Welch's test, later measures as ``a``.
    """
    targets = np.asarray(targets, dtype=float)
    names = list(risks)
    cols = {k: np.asarray(v, dtype=float) for k, v in risks.items()}
    n = targets.size
    if any(c.shape != (n,) for c in cols.values()):
        raise EstimationError("risk vectors and targets differ in length")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not 0 <= drop_count <= n - MIN_SECURITIES:
        raise EstimationError(
            f"drop count {drop_count} leaves fewer than {MIN_SECURITIES} of {n} securities"
        )
    drops = _draw_drop_sets(n, drop_count, iterations, seed)

    def work(sl):
        block = np.empty((len(names), sl.stop - sl.start))
        for r, i in enumerate(range(sl.start, sl.stop)):
            keep = np.ones(n, dtype=bool)
            keep[drops[i]] = False
            for m, name in enumerate(names):
                block[m, r] = _least_squares(cols[name][keep], targets[keep])[2]
        return block

    r2 = np.hstack(pmap(work, chunks(iterations, 128), workers))
    samples = {name: r2[m] for m, name in enumerate(names)}
    comps = [
        welch_test(samples[names[j]], samples[names[i]], names[j], names[i])
        for i in range(len(names))
        for j in range(i + 1, len(names))
    ]
    return BootstrapReport(iterations, drop_count, samples, comps, drops, sample, direction)


def bootstrap_compare(
    d: Dataset,
    measure_configs=DEFAULT_MEASURES,
    iterations: int = 1000,
    drop_count: int = 25,
    seed: int = 0,
    workers: int = 1,
    d_out: Dataset | None = None,
    sample: str = "full",
) -> BootstrapReport:
    """
    Bootstrap R^2 comparison of measures on ``d``.

    With ``d_out`` the targets are its mean premiums (predictive power);
    risks always come from ``d``.
    """
    _check_cross_section(d)
    if d_out is not None and d_out.ids != d.ids:
        raise EstimationError("in-sample and out-of-sample security sets differ")
    risks = risk_table(d, _configs(measure_configs))
    targets = mean_premiums(d if d_out is None else d_out)
    return bootstrap_r2(
        risks, targets, iterations, drop_count, seed, workers, sample, "in" if d_out is None else "out"
    )


def regime_evaluation(
    d: Dataset, cal: RegimeCalendar, measure_configs=DEFAULT_MEASURES
) -> tuple[EvaluationReport, EvaluationReport]:
    """Explanatory power on the bull-market and bear-market sub-samples."""
    bull = filter_by_regime(d, cal, "bull")
    bear = filter_by_regime(d, cal, "bear")
    return (
        explanatory_power(bull, measure_configs, sample="bull"),
        explanatory_power(bear, measure_configs, sample="bear"),
    )
