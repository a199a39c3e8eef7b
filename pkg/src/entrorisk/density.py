"""
Nonparametric univariate density estimators.

Four estimators are provided, all returning a :class:`DensityEstimate`:

* :func:`histogram_density` -- equal-width bins over the sample range.
* :func:`kernel_density` -- Epanechnikov kernel, bandwidth usually from
  :func:`silverman_bandwidth`.
* :func:`spacing_density_simple` -- piecewise constant over blocks of
  ``m`` consecutive order statistics.
* :func:`spacing_density_correa` -- local-regression spacing estimator on
  each gap between neighbouring order statistics.

Spacing estimators need distinct order statistics.  Tied values are split
deterministically by adding ``rank * 1e-12 * (max - min)`` to the sorted
sample, which keeps the ordering and moves no point by more than
``n * 1e-12`` of the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EstimationError

__all__ = [
    "DensityEstimate",
    "BinRule",
    "histogram_density",
    "histogram_counts",
    "bin_count",
    "epanechnikov",
    "silverman_bandwidth",
    "kernel_density",
    "spacing_order",
    "spacing_density_simple",
    "spacing_density_correa",
]

TIE_EPS = 1e-12


@dataclass(frozen=True)
class DensityEstimate:
    """
    An estimated density.

    ``evaluate`` maps an array of points to non-negative densities and is
    zero outside ``support``.  ``sample_range`` is ``(min, max)`` of the
    sample, the default entropy integration range.  For piecewise-constant
    estimates ``breakpoints`` lists the interior jumps; quadrature uses them
    to integrate those estimates exactly.
    """

    method: str
    support: tuple[float, float]
    sample_range: tuple[float, float]
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    params: dict = field(default_factory=dict)
    breakpoints: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    piecewise_constant: bool = False
    edges: np.ndarray | None = field(default=None, repr=False)
    counts: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.evaluate(x)


def _sample(sample, min_n: int = 1) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < min_n:
        raise EstimationError(f"need at least {min_n} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise EstimationError("sample contains non-finite values")
    return x


def _piecewise_constant(edges: np.ndarray, values: np.ndarray) -> Callable:
    """Right-continuous step function on ``[edges[0], edges[-1]]``, zero elsewhere."""
    edges = edges.copy()
    values = values.copy()
    last = len(values) - 1

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, last)
        inside = (x >= edges[0]) & (x <= edges[-1])
        return np.where(inside, values[idx], 0.0)

    return evaluate


# -- histogram ---------------------------------------------------------------


@dataclass(frozen=True)
class BinRule:
    """
    How to choose the number of histogram bins.

    ``kind`` is one of ``fixed``, ``sqrt``, ``scott`` or
    ``freedman_diaconis``; ``k`` is used only by ``fixed``.
    """

    kind: str
    k: int | None = None

    _KINDS = ("fixed", "sqrt", "scott", "freedman_diaconis")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown bin rule {self.kind!r}; choose from {self._KINDS}")
        if self.kind == "fixed" and (self.k is None or int(self.k) != self.k or self.k < 2):
            raise ValueError(f"fixed bin count must be an integer >= 2, got {self.k!r}")

    @classmethod
    def fixed(cls, k: int) -> "BinRule":
        return cls("fixed", k)

    @classmethod
    def coerce(cls, rule) -> "BinRule":
        """Accept a ``BinRule``, an integer bin count or a rule name."""
        if isinstance(rule, BinRule):
            return rule
        if isinstance(rule, (int, np.integer)) and not isinstance(rule, bool):
            return cls.fixed(int(rule))
        if isinstance(rule, str):
            name = {"fd": "freedman_diaconis"}.get(rule, rule)
            return cls(name)
        raise ValueError(f"cannot interpret {rule!r} as a bin rule")


def _iqr(x: np.ndarray) -> float:
    q75, q25 = np.percentile(x, [75, 25])
    return float(q75 - q25)


def _resolve_bins(x: np.ndarray, rule: BinRule) -> tuple[int, bool]:
    """Bin count for ``x`` and whether Freedman-Diaconis fell back to sqrt."""
    if rule.kind == "fixed":
        return int(rule.k), False
    n = x.size
    if n < 4:
        raise EstimationError(f"data-driven bin rules need n >= 4, got {n}")
    width = float(x.max() - x.min())
    if rule.kind == "sqrt":
        return max(2, math.ceil(math.sqrt(n))), False
    if width == 0:
        raise EstimationError("zero range")
    if rule.kind == "scott":
        s = float(np.std(x, ddof=1))
        return max(2, math.ceil(width / (3.49 * s * n ** (-1 / 3)))), False
    iqr = _iqr(x)
    if iqr == 0:
        return max(2, math.ceil(math.sqrt(n))), True
    return max(2, math.ceil(width / (2 * iqr * n ** (-1 / 3)))), False


def bin_count(sample, rule) -> int:
    """Number of histogram bins chosen by ``rule`` (``int``, name or :class:`BinRule`)."""
    x = _sample(sample, 2)
    return _resolve_bins(x, BinRule.coerce(rule))[0]


def histogram_counts(rows, k: int):
    """
    Equal-width histogram counts for every row of a 2-D array.

    Returns ``(counts, lo, width)`` where ``counts`` has shape ``(rows, k)``.
    Bins are half-open except the last, which also holds the row maximum.
    This is the single binning routine behind every histogram estimate.
    """
    X = np.asarray(rows, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array")
    if k < 2:
        raise EstimationError(f"need k >= 2 bins, got {k}")
    r, n = X.shape
    if n < 2:
        raise EstimationError(f"need at least 2 observations, got {n}")
    lo = X.min(axis=1)
    width = (X.max(axis=1) - lo) / k
    if np.any(width <= 0):
        raise EstimationError("zero range")
    idx = _bin_index(X, lo[:, None], width[:, None], k)
    flat = idx + (np.arange(r) * k)[:, None]
    counts = np.bincount(flat.ravel(), minlength=r * k).reshape(r, k)
    return counts, lo, width


def _bin_index(x, lo, width, k):
    idx = np.floor((x - lo) / width)
    return np.clip(idx, 0, k - 1).astype(np.intp)


def histogram_density(sample, rule=175) -> DensityEstimate:
    """
    Equal-width histogram density ``v_j / (n h)``.

    Parameters
    ----------
    sample : array_like
        Observations, at least 2 and not all equal.
    rule : int, str or BinRule
        Bin count or rule name (``sqrt``, ``scott``, ``freedman_diaconis``).
    """
    x = _sample(sample, 2)
    rule = BinRule.coerce(rule)
    if x.max() == x.min():
        raise EstimationError("zero range")
    k, fallback = _resolve_bins(x, rule)
    counts, lo, width = histogram_counts(x[None, :], k)
    counts, lo, h = counts[0], float(lo[0]), float(width[0])
    hi = float(x.max())
    n = x.size
    dens = counts / (n * h)
    edges = lo + h * np.arange(k + 1)
    edges[-1] = hi

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, dens[_bin_index(t, lo, h, k)], 0.0)

    params = {"k": k, "h": h, "rule": rule.kind, "n": n}
    if fallback:
        params["fd_fallback"] = "sqrt"
    return DensityEstimate(
        method="histogram",
        support=(lo, hi),
        sample_range=(lo, hi),
        evaluate=evaluate,
        params=params,
        breakpoints=edges[1:-1].copy(),
        piecewise_constant=True,
        edges=edges,
        counts=counts,
    )


# -- kernel ------------------------------------------------------------------


def epanechnikov(z):
    """Epanechnikov kernel ``0.75 (1 - z^2)`` on ``|z| <= 1``, zero elsewhere."""
    z = np.asarray(z, dtype=float)
    out = np.where(np.abs(z) <= 1.0, 0.75 * (1.0 - z * z), 0.0)
    return out[()] if out.ndim == 0 else out


KERNELS = {"epanechnikov": epanechnikov}


def silverman_bandwidth(sample) -> float:
    """
    Silverman's rule of thumb, ``1.06 min(s, IQR/1.34) n^(-1/5)``.

    ``s`` uses the ``n - 1`` divisor.  When the IQR is zero but ``s`` is
    not, ``s`` alone is used.
    """
    x = _sample(sample, 2)
    s = float(np.std(x, ddof=1))
    spread = min(s, _iqr(x) / 1.34)
    if spread <= 0:
        spread = s
    if spread <= 0:
        raise EstimationError("zero bandwidth: sample has no spread")
    return 1.06 * spread * x.size ** (-0.2)


def kernel_density(sample, h: float | None = None, kernel: str = "epanechnikov") -> DensityEstimate:
    """
    Kernel density estimate ``(1/(n h)) sum K((x - x_i)/h)``.

    ``h`` defaults to :func:`silverman_bandwidth`.  Only the Epanechnikov
    kernel is implemented; its polynomial form lets each evaluation use
    prefix sums over the sorted sample instead of a full pass.
    """
    x = _sample(sample, 1)
    if kernel not in KERNELS:
        raise ValueError(f"unsupported kernel {kernel!r}; available: {sorted(KERNELS)}")
    if h is None:
        h = silverman_bandwidth(x)
    h = float(h)
    if not h > 0:
        raise EstimationError(f"bandwidth must be positive, got {h}")
    n = x.size
    lo, hi = float(x.min()), float(x.max())
    center = float(np.mean(x))
    u = np.sort((x - center) / h)
    s1 = np.concatenate([[0.0], np.cumsum(u)])
    s2 = np.concatenate([[0.0], np.cumsum(u * u)])

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        v = (t - center) / h
        a = np.searchsorted(u, v - 1.0, side="left")
        b = np.searchsorted(u, v + 1.0, side="right")
        c = b - a
        sq = c * v * v - 2.0 * v * (s1[b] - s1[a]) + (s2[b] - s2[a])
        out = 0.75 * (c - sq) / (n * h)
        return np.maximum(out, 0.0)

    return DensityEstimate(
        method="kernel",
        support=(lo - h, hi + h),
        sample_range=(lo, hi),
        evaluate=evaluate,
        params={"h": h, "kernel": kernel, "n": n},
    )


# -- sample spacing ----------------------------------------------------------


def spacing_order(n: int, k: int) -> int:
    """Spacing order ``ceil(n / k)`` for ``k`` nominal bins."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    return -(-n // k)


def _distinct_order_statistics(x: np.ndarray) -> tuple[np.ndarray, bool]:
    xs = np.sort(x)
    if np.all(np.diff(xs) > 0):
        return xs, False
    width = xs[-1] - xs[0]
    if width == 0:
        raise EstimationError("zero range")
    xs = xs + np.arange(xs.size) * (TIE_EPS * width)
    if not np.all(np.diff(xs) > 0):
        raise EstimationError("zero spacing after tie perturbation")
    return xs, True


def spacing_density_simple(sample, m: int) -> DensityEstimate:
    """
    Simple sample-spacing density of order ``m``.

    Order statistics ``x_(0) .. x_(n-1)`` are grouped into blocks spanning
    ``m`` spacings; a block holding ``c`` spacings gets density
    ``c / ((n - 1) * width)``.  The last block may hold fewer than ``m``.
    The ``n - 1`` normaliser makes the estimate integrate to one.
    """
    x = _sample(sample, 2)
    n = x.size
    m = int(m)
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    if n <= m:
        raise EstimationError(f"order too large: m={m} needs n > m, got n={n}")
    xs, perturbed = _distinct_order_statistics(x)
    starts = np.arange(0, n - 1, m)
    ends = np.minimum(starts + m, n - 1)
    widths = xs[ends] - xs[starts]
    dens = (ends - starts) / ((n - 1) * widths)
    edges = np.append(xs[starts], xs[-1])
    return DensityEstimate(
        method="spacing_simple",
        support=(float(xs[0]), float(xs[-1])),
        sample_range=(float(xs[0]), float(xs[-1])),
        evaluate=_piecewise_constant(edges, dens),
        params={"m": m, "n": n, "ties_perturbed": perturbed},
        breakpoints=edges[1:-1].copy(),
        piecewise_constant=True,
        edges=edges,
    )


def _correa_slopes(xs: np.ndarray, r: int, chunk: int = 4096) -> np.ndarray:
    """Least-squares slope of rank on value over each clamped window ``i-r .. i+r``."""
    n = xs.size
    offsets = np.arange(-r, r + 1)
    out = np.empty(n - 1)
    for s in range(0, n - 1, chunk):
        i = np.arange(s, min(s + chunk, n - 1))
        j = i[:, None] + offsets
        valid = (j >= 0) & (j < n)
        vals = np.where(valid, xs[np.clip(j, 0, n - 1)], 0.0)
        cnt = valid.sum(axis=1)
        mean = vals.sum(axis=1) / cnt
        dev = np.where(valid, vals - mean[:, None], 0.0)
        num = (dev * offsets).sum(axis=1)
        den = (dev * dev).sum(axis=1)
        if np.any(den <= 0):
            raise EstimationError("all-equal spacing window")
        out[s : s + len(i)] = num / den
    return out


def spacing_density_correa(sample, m: int) -> DensityEstimate:
    """
    Correa local-regression spacing density of order ``m``.

    On ``[x_(i), x_(i+1))`` the density is ``(1/n)`` times the least-squares
    slope of rank against value over the window ``i - m//2 .. i + m//2``,
    truncated at the ends of the sample.  Negative values are floored at
    zero and the result is rescaled to integrate to one.
    """
    x = _sample(sample, 2)
    n = x.size
    m = int(m)
    if m < 2:
        raise ValueError(f"Correa order must be >= 2, got {m}")
    if n <= m:
        raise EstimationError(f"order too large: m={m} needs n > m, got n={n}")
    xs, perturbed = _distinct_order_statistics(x)
    raw = np.maximum(_correa_slopes(xs, m // 2), 0.0) / n
    mass = float(np.sum(raw * np.diff(xs)))
    if not mass > 0:
        raise EstimationError("Correa estimate has zero mass")
    dens = raw / mass
    return DensityEstimate(
        method="spacing_correa",
        support=(float(xs[0]), float(xs[-1])),
        sample_range=(float(xs[0]), float(xs[-1])),
        evaluate=_piecewise_constant(xs, dens),
        params={"m": m, "n": n, "ties_perturbed": perturbed, "raw_mass": mass},
        breakpoints=xs[1:-1].copy(),
        piecewise_constant=True,
        edges=xs.copy(),
    )
