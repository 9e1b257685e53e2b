"""Pearson, Kendall tau-b and median-based robust correlation, plus cross-estimator tallies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._validation import Undefined, UndefinedMetricError, check_paired, evaluate
from .series import SEASONS, TimeAxis, TimeScale, aggregate
from .variability import median

ESTIMATORS = ("pearson", "kendall", "cmed")
AGREEMENT_TOLERANCE = 0.1
# absorbs representation error when differencing decimal-looking values such as 0.4 - 0.3
_AGREEMENT_SLACK = 1e-12


def pearson(x, y) -> float:
    """Sample product-moment correlation."""
    x, y = check_paired(x, y)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedMetricError("constant series")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise UndefinedMetricError("constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _tied_pairs(*keys: np.ndarray) -> int:
    """Number of index pairs sharing every key in ``keys``."""
    order = np.lexsort(keys[::-1])
    new_group = np.zeros(order.size, dtype=bool)
    new_group[0] = True
    for k in keys:
        s = k[order]
        new_group[1:] |= s[1:] != s[:-1]
    sizes = np.diff(np.r_[np.flatnonzero(new_group), order.size]).astype(np.int64)
    return int((sizes * (sizes - 1) // 2).sum())


def count_inversions(seq) -> int:
    """Pairs ``i < j`` with ``seq[i] > seq[j]`` by bottom-up merge sort, O(n log n) per level.

    Each level merges neighbouring sorted blocks and counts, for every element
    of a right block, the elements of its left block that are strictly greater.
    """
    _, a = np.unique(np.asarray(seq), return_inverse=True)
    a = a.astype(np.int64).ravel()
    n = a.size
    span = np.int64(n + 1)
    total = 0
    width = 1
    idx = np.arange(n, dtype=np.int64)
    while width < n:
        pair = idx // (2 * width)
        is_right = (idx // width) % 2 == 1
        left_keys = pair[~is_right] * span + a[~is_right]
        right_pair = pair[is_right]
        right_vals = a[is_right]
        hi = np.searchsorted(left_keys, (right_pair + 1) * span, side="left")
        lo = np.searchsorted(left_keys, right_pair * span + right_vals, side="right")
        total += int((hi - lo).sum())
        a = np.sort(pair * span + a) - pair * span
        width *= 2
    return total


def kendall_tau(x, y) -> float:
    """Kendall's tau-b; reduces to the tie-free tau when no ties are present."""
    x, y = check_paired(x, y)
    n = x.size
    n0 = n * (n - 1) // 2
    tx = _tied_pairs(x)
    ty = _tied_pairs(y)
    if n0 == tx or n0 == ty:
        raise UndefinedMetricError("all values tied")
    txy = _tied_pairs(x, y)
    order = np.lexsort((y, x))
    discordant = count_inversions(y[order])
    # pairs untied in both coordinates are concordant or discordant
    s = n0 - tx - ty + txy - 2 * discordant
    return s / math.sqrt((n0 - tx) * (n0 - ty))


def r_cmed(x, y) -> float:
    """Correlation median estimator built from robustly standardized sums and differences."""
    x, y = check_paired(x, y)
    mx, my = median(x), median(y)
    sx, sy = median(np.abs(x - mx)), median(np.abs(y - my))
    if sx == 0 or sy == 0:
        raise UndefinedMetricError("zero MAD")
    zx = (x - mx) / sx
    zy = (y - my) / sy
    mu2 = median(np.abs(zx + zy)) ** 2
    mv2 = median(np.abs(zx - zy)) ** 2
    if mu2 + mv2 == 0:
        raise UndefinedMetricError("zero spread of standardized sum and difference")
    return (mu2 - mv2) / (mu2 + mv2)


@dataclass(frozen=True)
class CorrelationTriple:
    pearson: "float | Undefined"
    kendall: "float | Undefined"
    cmed: "float | Undefined"
    n: int
    scale: TimeScale
    season: str | None = None

    @property
    def scale_label(self) -> str:
        return self.scale.value if self.season is None else f"{self.scale.value}:{self.season}"

    def __getitem__(self, name: str):
        return getattr(self, name)


def correlation_triple(x, y, scale: "TimeScale | str" = TimeScale.HOURLY,
                       season: str | None = None) -> CorrelationTriple:
    x, y = check_paired(x, y)
    return CorrelationTriple(evaluate(pearson, x, y), evaluate(kendall_tau, x, y),
                             evaluate(r_cmed, x, y), x.size, TimeScale.parse(scale), season)


def correlate_at_scale(x, y, axis: TimeAxis, scale: "TimeScale | str") -> list[CorrelationTriple]:
    """All three estimators on identically aggregated pairs.

    The seasonal scale yields four triples, one per season, each pairing that
    season's yearly means; every other scale yields a single triple.
    """
    scale = TimeScale.parse(scale)
    if scale is TimeScale.HOURLY:
        return [correlation_triple(x, y, scale)]
    ax, ay = aggregate(x, axis, scale), aggregate(y, axis, scale)
    if scale is TimeScale.SEASONAL:
        out = []
        for name in SEASONS:
            sx, sy = ax.season(name), ay.season(name)
            if len(sx) < 3:
                undefined = Undefined(f"only {len(sx)} {name} seasons")
                out.append(CorrelationTriple(undefined, undefined, undefined, len(sx), scale, name))
            else:
                out.append(correlation_triple(sx.values, sy.values, scale, name))
        return out
    if len(ax) < 3:
        undefined = Undefined(f"only {len(ax)} {scale.value} periods")
        return [CorrelationTriple(undefined, undefined, undefined, len(ax), scale)]
    return [correlation_triple(ax.values, ay.values, scale)]


@dataclass
class AgreementTable:
    """Sign and closeness tallies over a grid of correlation triples."""

    total: int
    positive: dict = field(default_factory=dict)
    negative: dict = field(default_factory=dict)
    zero: dict = field(default_factory=dict)
    undefined: dict = field(default_factory=dict)
    same_sign: dict = field(default_factory=dict)
    within_tolerance: dict = field(default_factory=dict)
    pair_undefined: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str, int]]:
        out = []
        for name in ESTIMATORS:
            for label, table in (("positive", self.positive), ("negative", self.negative),
                                 ("zero", self.zero), ("undefined", self.undefined)):
                out.append((name, label, table[name]))
        for pair in self.same_sign:
            key = f"{pair[0]}~{pair[1]}"
            out.append((key, "same_sign", self.same_sign[pair]))
            out.append((key, f"abs_diff_le_{AGREEMENT_TOLERANCE}", self.within_tolerance[pair]))
            out.append((key, "undefined", self.pair_undefined[pair]))
        return out


def _sign(v) -> int | None:
    if isinstance(v, Undefined):
        return None
    return (v > 0) - (v < 0)


def agreement_table(triples) -> AgreementTable:
    """Count positive/negative estimates and pairwise same-sign / ``|diff| <= 0.1`` agreement.

    Points where an estimator is undefined are left out of its tallies and
    counted under ``undefined``; exact zeros have no sign and are counted
    under ``zero``.
    """
    triples = list(triples)
    table = AgreementTable(total=len(triples))
    for name in ESTIMATORS:
        signs = [_sign(t[name]) for t in triples]
        table.positive[name] = signs.count(1)
        table.negative[name] = signs.count(-1)
        table.zero[name] = signs.count(0)
        table.undefined[name] = signs.count(None)
    for a, b in combinations(ESTIMATORS, 2):
        same = close = undef = 0
        for t in triples:
            va, vb = t[a], t[b]
            if isinstance(va, Undefined) or isinstance(vb, Undefined):
                undef += 1
                continue
            sa, sb = _sign(va), _sign(vb)
            same += sa == sb != 0
            close += abs(va - vb) <= AGREEMENT_TOLERANCE + _AGREEMENT_SLACK
        table.same_sign[(a, b)] = same
        table.within_tolerance[(a, b)] = close
        table.pair_undefined[(a, b)] = undef
    return table
