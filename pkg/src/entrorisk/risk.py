"""
Risk measures over premium series: standard deviation, CAPM beta and the
exponential-entropy measure ``exp(H)``.

Single-series functions return a :class:`RiskEstimate`.  :func:`risk_values`
evaluates one :class:`MeasureConfig` over every row of a premium matrix and
is what the portfolio and evaluation modules use; both paths share the same
arithmetic, so they agree bit for bit.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .data import Dataset, PremiumSeries
from .density import (
    BinRule,
    _resolve_bins,
    kernel_density,
    spacing_density_correa,
    spacing_density_simple,
    spacing_order,
)
from .entropy import QuadratureSpec, entropy_plugin, histogram_entropy
from .errors import EstimationError

__all__ = [
    "MeasureConfig",
    "RiskEstimate",
    "DEFAULT_MEASURES",
    "default_measures",
    "risk_stddev",
    "risk_beta",
    "risk_entropy",
    "risk_values",
    "risk_table",
]

BACKENDS = ("histogram", "kernel", "spacing_simple", "spacing_correa")
DEFAULT_BINS = {1: 175, 2: 50}


@dataclass(frozen=True)
class MeasureConfig:
    """
    A named risk measure and its estimator settings.

    ``measure`` is ``stddev``, ``beta`` or ``entropy``.  For entropy,
    ``bins`` defaults to 175 (order 1) or 50 (order 2); spacing backends
    derive their order from it unless ``order`` is given, and the kernel
    backend uses Silverman's bandwidth unless ``bandwidth`` is given.
    ``kernel_range`` picks the kernel integration range: ``sample``
    (min..max) or ``support`` (min-h..max+h).
    """

    name: str
    measure: str
    alpha: int = 1
    backend: str = "histogram"
    bins: int | str | None = None
    bandwidth: float | None = None
    order: int | None = None
    kernel_range: str = "sample"

    def __post_init__(self):
        if self.measure not in ("stddev", "beta", "entropy"):
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.measure == "entropy":
            if self.alpha not in (1, 2):
                raise ValueError(f"entropy order must be 1 or 2, got {self.alpha}")
            if self.backend not in BACKENDS:
                raise ValueError(f"unknown backend {self.backend!r}; choose from {BACKENDS}")
            if self.kernel_range not in ("sample", "support"):
                raise ValueError("kernel_range must be 'sample' or 'support'")

    @property
    def tag(self) -> str:
        if self.measure == "entropy":
            return "entropy_shannon" if self.alpha == 1 else "entropy_renyi"
        return self.measure

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def default_measures(
    backend: str = "histogram", bins_shannon: int | str = 175, bins_renyi: int | str = 50
) -> tuple[MeasureConfig, ...]:
    """Standard deviation, beta, Shannon and Renyi entropy measures."""
    return (
        MeasureConfig("stddev", "stddev"),
        MeasureConfig("beta", "beta"),
        MeasureConfig("entropy_shannon", "entropy", 1, backend, bins_shannon),
        MeasureConfig("entropy_renyi", "entropy", 2, backend, bins_renyi),
    )


DEFAULT_MEASURES = default_measures()


@dataclass(frozen=True)
class RiskEstimate:
    measure: str
    value: float
    config: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


def _values(p) -> np.ndarray:
    x = p.premiums if isinstance(p, PremiumSeries) else p
    return np.asarray(x, dtype=float)


# -- row-wise kernels ----------------------------------------------------------


def _stddev_rows(P: np.ndarray) -> np.ndarray:
    if P.shape[1] < 2:
        raise EstimationError("standard deviation needs at least 2 observations")
    return np.std(P, axis=1, ddof=1)


def _beta_rows(P: np.ndarray, market: np.ndarray) -> np.ndarray:
    if P.shape[1] != market.shape[0]:
        raise EstimationError(f"length mismatch: {P.shape[1]} vs market {market.shape[0]}")
    if market.shape[0] < 2:
        raise EstimationError("beta needs at least 2 observations")
    mc = market - market.mean()
    var = (mc * mc).sum()
    if not var > 0:
        raise EstimationError("zero market variance")
    Pc = P - P.mean(axis=1, keepdims=True)
    return (Pc * mc).sum(axis=1) / var


def _entropy_one(x: np.ndarray, cfg: MeasureConfig, quad: QuadratureSpec) -> float:
    if x.max() == x.min():
        raise EstimationError("degenerate premium sample (zero range)")
    bins = DEFAULT_BINS[cfg.alpha] if cfg.bins is None else cfg.bins
    if cfg.backend == "kernel":
        f = kernel_density(x, cfg.bandwidth)
        rng = f.sample_range if cfg.kernel_range == "sample" else f.support
        return entropy_plugin(f, cfg.alpha, rng, quad).value
    k, _ = _resolve_bins(x, BinRule.coerce(bins))
    if cfg.backend == "histogram":
        return float(histogram_entropy(x[None, :], k, cfg.alpha)[0])
    m = cfg.order
    if m is None:
        m = spacing_order(x.size, k)
        if cfg.backend == "spacing_correa":
            m = max(m, 2)
    est = spacing_density_simple if cfg.backend == "spacing_simple" else spacing_density_correa
    return entropy_plugin(est(x, m), cfg.alpha, None, quad).value


def _entropy_rows(P: np.ndarray, cfg: MeasureConfig, quad: QuadratureSpec) -> np.ndarray:
    if cfg.backend == "histogram" and not isinstance(cfg.bins, str):
        k = DEFAULT_BINS[cfg.alpha] if cfg.bins is None else int(cfg.bins)
        try:
            return histogram_entropy(P, k, cfg.alpha)
        except EstimationError as exc:
            raise EstimationError(f"degenerate premium sample ({exc})") from None
    return np.array([_entropy_one(row, cfg, quad) for row in P])


def risk_values(
    P, cfg: MeasureConfig, market=None, quad: QuadratureSpec = QuadratureSpec()
) -> np.ndarray:
    """
    Risk of every row of the premium matrix ``P`` under ``cfg``.

    Entropy measures return ``exp(H)``; ``market`` is required for beta.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if cfg.measure == "stddev":
        return _stddev_rows(P)
    if cfg.measure == "beta":
        if market is None:
            raise ValueError("beta needs the market premium series")
        return _beta_rows(P, np.asarray(market, dtype=float))
    return np.exp(_entropy_rows(P, cfg, quad))


# -- single-series API ---------------------------------------------------------


def risk_stddev(p) -> RiskEstimate:
    """Sample standard deviation of the premiums (``n - 1`` divisor)."""
    x = _values(p)
    return RiskEstimate("stddev", float(_stddev_rows(x[None, :])[0]), {"ddof": 1})


def risk_beta(p, market) -> RiskEstimate:
    """CAPM beta: ``cov(p, market) / var(market)``."""
    x, m = _values(p), _values(market)
    if x.shape != m.shape:
        raise EstimationError(f"length mismatch: {x.size} vs market {m.size}")
    return RiskEstimate("beta", float(_beta_rows(x[None, :], m)[0]), {})


def risk_entropy(
    p,
    alpha: int = 1,
    backend: str = "histogram",
    bins: int | str | None = None,
    bandwidth: float | None = None,
    order: int | None = None,
    kernel_range: str = "sample",
    quad: QuadratureSpec = QuadratureSpec(),
) -> RiskEstimate:
    """
    Entropy risk ``exp(H)`` of the premium sample.

    Defaults to the closed-form histogram estimator with 175 bins for
    ``alpha=1`` and 50 bins for ``alpha=2``.
    """
    name = "entropy_shannon" if alpha == 1 else "entropy_renyi"
    cfg = MeasureConfig(name, "entropy", alpha, backend, bins, bandwidth, order, kernel_range)
    value = float(risk_values(_values(p), cfg, quad=quad)[0])
    return RiskEstimate(cfg.tag, value, cfg.as_dict())


def risk_table(d: Dataset, configs=DEFAULT_MEASURES) -> dict[str, np.ndarray]:
    """Per-security risk under each config, keyed by config name."""
    return {c.name: risk_values(d.premium_matrix, c, d.market_premium) for c in configs}
