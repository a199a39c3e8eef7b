"""
Equally weighted random portfolios and diversification curves.

Portfolios are drawn per size.  When a size admits no more distinct member
sets than requested, all of them are enumerated; otherwise portfolios are
drawn independently (members without replacement, portfolios with
replacement), chunk ``c`` of size ``s`` using a generator keyed on
``(seed, s, c)``.  Results are therefore identical for any worker count.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .data import Dataset, PremiumSeries
from .parallel import CHUNK, chunks, pmap, task_rng
from .risk import DEFAULT_MEASURES, MeasureConfig, risk_values

__all__ = [
    "Portfolio",
    "DiversificationCurve",
    "ScatterRow",
    "portfolio_premiums",
    "generate_random_portfolios",
    "diversification_curve",
    "scatter_dataset",
]


@dataclass(frozen=True)
class Portfolio:
    member_ids: tuple[str, ...]

    def __post_init__(self):
        ids = tuple(self.member_ids)
        if not ids:
            raise ValueError("portfolio needs at least one member")
        if len(set(ids)) != len(ids):
            raise ValueError("portfolio members must be distinct")
        object.__setattr__(self, "member_ids", ids)

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass(frozen=True)
class DiversificationCurve:
    measure: str
    sizes: np.ndarray
    mean_risk: np.ndarray
    reduction: np.ndarray
    counts: np.ndarray


class ScatterRow(NamedTuple):
    measure: str
    size: int
    value: float
    premium: float


def _mean_rows(P: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """
    Equal-weight premium rows for member-index matrix ``idx`` (portfolios x size).

    A second pass adds back the mean residual, so a portfolio of identical
    members reproduces their series bit for bit.
    """
    k = idx.shape[1]
    acc = P[idx[:, 0]].copy()
    for j in range(1, k):
        acc += P[idx[:, j]]
    mean = acc / k
    if k > 1 and k & (k - 1):
        acc = P[idx[:, 0]] - mean
        for j in range(1, k):
            acc += P[idx[:, j]] - mean
        mean += acc / k
    return mean


def portfolio_premiums(pf: Portfolio, d: Dataset) -> PremiumSeries:
    """Daily premium of the equally weighted portfolio ``pf``."""
    pos = {sid: i for i, sid in enumerate(d.ids)}
    try:
        idx = np.array([[pos[m] for m in pf.member_ids]])
    except KeyError as exc:
        raise ValueError(f"unknown member id {exc.args[0]!r}") from None
    label = "+".join(pf.member_ids) if pf.size <= 5 else f"portfolio[{pf.size}]"
    return PremiumSeries(label, _mean_rows(d.premium_matrix, idx)[0])


def _member_indices(n_universe: int, size: int, max_per_size: int, seed: int) -> np.ndarray:
    if not 1 <= size <= n_universe:
        raise ValueError(f"portfolio size {size} outside 1..{n_universe}")
    if max_per_size < 1:
        raise ValueError("max_per_size must be >= 1")
    if math.comb(n_universe, size) <= max_per_size:
        combos = itertools.combinations(range(n_universe), size)
        return np.fromiter(itertools.chain.from_iterable(combos), dtype=np.intp).reshape(-1, size)
    out = np.empty((max_per_size, size), dtype=np.intp)
    for c, sl in enumerate(chunks(max_per_size)):
        keys = task_rng(seed, size, c).random((sl.stop - sl.start, n_universe))
        out[sl] = np.sort(np.argsort(keys, axis=1)[:, :size], axis=1)
    return out


def generate_random_portfolios(
    universe: Sequence[str], sizes: Sequence[int], max_per_size: int, seed: int
) -> list[Portfolio]:
    """
    Random equally weighted portfolios, ``min(max_per_size, C(N, s))`` per size.

    Sizes whose combination count fits within ``max_per_size`` are
    enumerated in lexicographic order.
    """
    universe = list(universe)
    out = []
    for s in sizes:
        idx = _member_indices(len(universe), int(s), max_per_size, seed)
        out.extend(Portfolio(tuple(universe[i] for i in row)) for row in idx)
    return out


TOTAL_RISK_MEASURES = tuple(c for c in DEFAULT_MEASURES if c.measure != "beta")


def _check_measures(configs: Sequence[MeasureConfig], allow_beta: bool) -> None:
    for c in configs:
        if c.measure == "beta" and not allow_beta:
            raise ValueError("beta measures systematic risk only and is excluded from diversification curves")


def _portfolio_risks(d, idx, configs, workers):
    """Risk of every portfolio in ``idx`` under each config, plus mean premiums."""
    P, mkt = d.premium_matrix, d.market_premium

    def work(sl):
        rows = _mean_rows(P, idx[sl])
        vals = [risk_values(rows, c, mkt) for c in configs]
        return vals, rows.mean(axis=1)

    parts = pmap(work, chunks(len(idx), CHUNK), workers)
    risks = [np.concatenate([p[0][i] for p in parts]) for i in range(len(configs))]
    return risks, np.concatenate([p[1] for p in parts])


def diversification_curve(
    d: Dataset,
    sizes: Sequence[int],
    max_per_size: int,
    measure_configs: Sequence[MeasureConfig] = TOTAL_RISK_MEASURES,
    seed: int = 0,
    workers: int = 1,
) -> dict[str, DiversificationCurve]:
    """
    Mean portfolio risk per size and the reduction relative to size 1.

    ``reduction = 1 - mean_risk(size) / mean_risk(1)``; size 1 is evaluated
    even when not requested so the curve can be normalised.
    """
    configs = list(measure_configs)
    _check_measures(configs, allow_beta=False)
    sizes = sorted({int(s) for s in sizes} | {1})
    means = np.empty((len(configs), len(sizes)))
    counts = np.empty(len(sizes), dtype=int)
    for j, s in enumerate(sizes):
        idx = _member_indices(len(d.ids), s, max_per_size, seed)
        risks, _ = _portfolio_risks(d, idx, configs, workers)
        counts[j] = len(idx)
        for i, r in enumerate(risks):
            means[i, j] = r.mean()
    out = {}
    for i, c in enumerate(configs):
        red = 1.0 - means[i] / means[i, 0]
        red[0] = 0.0
        out[c.name] = DiversificationCurve(c.name, np.array(sizes), means[i].copy(), red, counts.copy())
    return out


def scatter_dataset(
    d: Dataset,
    sizes: Sequence[int] = (1, 2, 5, 10),
    per_size: int = 200,
    measure_configs: Sequence[MeasureConfig] = DEFAULT_MEASURES,
    seed: int = 0,
    workers: int = 1,
) -> list[ScatterRow]:
    """
    Risk and mean daily premium of random portfolios, one row per portfolio per measure.

    With 150 securities and the defaults this gives 150 singles plus 200
    portfolios of each larger size: 750 rows per measure.
    """
    configs = list(measure_configs)
    rows = []
    for s in sizes:
        idx = _member_indices(len(d.ids), int(s), per_size, seed)
        risks, prem = _portfolio_risks(d, idx, configs, workers)
        for c, r in zip(configs, risks):
            rows.extend(ScatterRow(c.name, int(s), float(v), float(p)) for v, p in zip(r, prem))
    return rows
