"""
Shannon and Renyi entropies.

Discrete entropies are in bits, differential entropies in nats.  For
histograms the differential entropies have closed forms
(:func:`histogram_entropy_shannon`, :func:`histogram_entropy_renyi`); any
other :class:`~entrorisk.density.DensityEstimate` goes through
:func:`entropy_plugin`, which integrates ``-f ln f`` or ``f^2`` numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import BinRule, DensityEstimate, _resolve_bins, _sample, histogram_counts
from .errors import EstimationError

__all__ = [
    "EntropyValue",
    "QuadratureSpec",
    "discrete_entropy",
    "entropy_plugin",
    "histogram_entropy",
    "histogram_entropy_shannon",
    "histogram_entropy_renyi",
]


@dataclass(frozen=True)
class EntropyValue:
    value: float
    alpha: float
    kind: str  # "discrete" (bits) or "differential" (nats)
    estimator: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Composite trapezoid rule on ``points`` equally spaced nodes.

    For piecewise-constant densities the nodes are merged with the jump
    locations, which makes the rule exact for them.
    """

    points: int = 4096
    scheme: str = "trapezoid"

    def __post_init__(self):
        if self.scheme != "trapezoid":
            raise ValueError(f"unsupported quadrature scheme {self.scheme!r}")
        if self.points < 16:
            raise ValueError(f"quadrature needs >= 16 points, got {self.points}")


def discrete_entropy(p, alpha: float = 1.0) -> EntropyValue:
    """
    Order-``alpha`` entropy of a probability vector, in bits.

    ``alpha == 1`` is the Shannon limit; outcomes with zero probability
    contribute nothing for every order.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    if alpha < 0:
        raise ValueError(f"order must be >= 0, got {alpha}")
    q = p[p > 0]
    if alpha == 1:
        h = -float(np.sum(q * np.log2(q)))
    else:
        h = float(np.log2(np.sum(q**alpha)) / (1.0 - alpha))
    return EntropyValue(max(h, 0.0), float(alpha), "discrete", {"outcomes": p.size})


def _integrate(f: DensityEstimate, g, lo: float, hi: float, quad: QuadratureSpec) -> float:
    grid = np.linspace(lo, hi, quad.points)
    if f.piecewise_constant:
        bp = f.breakpoints
        grid = np.union1d(grid, bp[(bp > lo) & (bp < hi)])
        # no jump inside a panel: both one-sided limits equal the midpoint value
        inner = g(f.evaluate(0.5 * (grid[:-1] + grid[1:])))
        return float(np.sum(inner * np.diff(grid)))
    vals = g(f.evaluate(grid))
    return float(np.sum(0.5 * (vals[:-1] + vals[1:]) * np.diff(grid)))


def _neg_f_log_f(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = -v[pos] * np.log(v[pos])
    return out


def entropy_plugin(
    f: DensityEstimate,
    alpha: float = 1,
    range: tuple[float, float] | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
) -> EntropyValue:
    """
    Plug-in differential entropy of ``f`` over ``range`` (default: sample range).

    ``alpha`` must be 1 (Shannon, ``-int f ln f``) or 2 (Renyi,
    ``-ln int f^2``).
    """
    if alpha not in (1, 2):
        raise ValueError(f"only orders 1 and 2 are supported, got {alpha}")
    lo, hi = f.sample_range if range is None else range
    if not hi > lo:
        raise EstimationError(f"degenerate integration range [{lo}, {hi}]")
    if alpha == 1:
        h = _integrate(f, _neg_f_log_f, lo, hi, quad)
    else:
        s = _integrate(f, np.square, lo, hi, quad)
        if not s > 0:
            raise EstimationError("integral of f^2 is zero over the range")
        h = -float(np.log(s))
    est = {"method": f.method, **f.params, "range": (float(lo), float(hi)), "points": quad.points}
    return EntropyValue(h, float(alpha), "differential", est)


def histogram_entropy(rows, k: int, alpha: int) -> np.ndarray:
    """
    Closed-form histogram entropies, one per row of a 2-D array (nats).

    Shannon: ``-(1/n) sum v_j ln(v_j / (n h))``; Renyi:
    ``-ln sum h (v_j / (n h))^2``.  Empty bins contribute nothing.
    """
    if alpha not in (1, 2):
        raise ValueError(f"only orders 1 and 2 are supported, got {alpha}")
    counts, _, width = histogram_counts(rows, k)
    n = counts.sum(axis=1)[0]
    v = counts.astype(float)
    nh = (n * width)[:, None]
    if alpha == 1:
        logs = np.log(np.where(v > 0, v, 1.0) / nh)
        return -(v * logs).sum(axis=1) / n
    return -np.log((v * v).sum(axis=1) / (n * n * width))


def _histogram_value(sample, k, alpha) -> EntropyValue:
    x = _sample(sample, 2)
    rule = BinRule.coerce(k)
    if x.max() == x.min():
        raise EstimationError("zero range")
    kk, _ = _resolve_bins(x, rule)
    h = float(histogram_entropy(x[None, :], kk, alpha)[0])
    return EntropyValue(h, float(alpha), "differential", {"method": "histogram", "k": kk, "n": x.size})


def histogram_entropy_shannon(sample, k=175) -> EntropyValue:
    """Closed-form Shannon entropy of the ``k``-bin histogram density."""
    return _histogram_value(sample, k, 1)


def histogram_entropy_renyi(sample, k=50) -> EntropyValue:
    """Closed-form Renyi (order 2) entropy of the ``k``-bin histogram density."""
    return _histogram_value(sample, k, 2)
