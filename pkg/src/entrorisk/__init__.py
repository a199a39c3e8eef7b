"""Entropy-based risk measures for financial returns.

Density estimation, Shannon/Renyi differential entropy, the ``exp(H)``
entropy risk measure next to standard deviation and CAPM beta, random
portfolio diversification curves, and cross-sectional evaluation of how
well each measure explains mean excess returns.
"""

__version__ = "0.1.0"

from .errors import DataError, EntroRiskError, EstimationError  # noqa: E402
from .data import (  # noqa: E402
    Dataset,
    PremiumSeries,
    RegimeCalendar,
    ReturnSeries,
    WindowSplit,
    filter_by_regime,
    generate_synthetic,
    load_dataset,
    load_regime_calendar,
    premiums,
    rolling_windows,
    split_in_out,
)
from .density import (  # noqa: E402
    BinRule,
    DensityEstimate,
    bin_count,
    epanechnikov,
    histogram_density,
    kernel_density,
    silverman_bandwidth,
    spacing_density_correa,
    spacing_density_simple,
    spacing_order,
)
from .entropy import (  # noqa: E402
    EntropyValue,
    QuadratureSpec,
    discrete_entropy,
    entropy_plugin,
    histogram_entropy_renyi,
    histogram_entropy_shannon,
)
from .risk import (  # noqa: E402
    DEFAULT_MEASURES,
    MeasureConfig,
    RiskEstimate,
    risk_beta,
    risk_entropy,
    risk_stddev,
    risk_table,
)
from .portfolio import (  # noqa: E402
    Portfolio,
    diversification_curve,
    generate_random_portfolios,
    portfolio_premiums,
    scatter_dataset,
)
from .evaluation import (  # noqa: E402
    bootstrap_compare,
    explanatory_power,
    ols_fit,
    predictive_power,
    regime_evaluation,
    rolling_evaluation,
)
