"""Classical, robust and joint variability statistics.

Standard deviations and covariances use the ``N - 1`` denominator. Quantiles
interpolate linearly between order statistics (the usual "type 7"
definition), and the median is that quantile at 0.5, so ``percentiles(x)[50]``
and ``median_and_mad(x)[0]`` are bitwise equal. The MAD carries no
normal-consistency factor.

Functions raise :class:`~synergy._validation.UndefinedMetricError` when the
statistic has no value for the data (zero median, zero mean, singular
covariance); containers store those cells as :class:`~synergy._validation.Undefined`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import Undefined, UndefinedMetricError, as_1d_float, check_paired, evaluate
from .series import InsufficientSpanError, TimeAxis, TimeScale, aggregate, complete_years

DEFAULT_QUANTILES = (50, 75, 90, 95)

# relative floor on 1 - r**2 below which the joint covariance counts as singular
_SINGULAR_RTOL = 1e-12


def _quantile_sorted(xs: np.ndarray, q: float) -> float:
    h = (xs.size - 1) * q
    lo = math.floor(h)
    frac = h - lo
    if frac == 0.0:
        return float(xs[lo])
    a, b = float(xs[lo]), float(xs[lo + 1])
    # two-sided lerp, exact at both ends and constant on ties
    return a + (b - a) * frac if frac < 0.5 else b - (b - a) * (1.0 - frac)


def median(values) -> float:
    xs = np.sort(as_1d_float(values))
    return _quantile_sorted(xs, 0.5)


def median_and_mad(values) -> tuple[float, float]:
    """Sample median and raw median absolute deviation."""
    x = as_1d_float(values)
    med = median(x)
    return med, median(np.abs(x - med))


def percentiles(values, qs=DEFAULT_QUANTILES) -> dict[float, float]:
    """Linear-interpolation percentiles, keyed by the requested percent values."""
    xs = np.sort(as_1d_float(values))
    out = {}
    for q in qs:
        if not 0 <= q <= 100:
            raise ValueError(f"percentile {q} outside [0, 100]")
        out[q] = _quantile_sorted(xs, q / 100.0)
    return out


def cv(values) -> float:
    """Coefficient of variation, sample standard deviation over mean."""
    x = as_1d_float(values, min_length=2)
    mean = x.mean()
    if mean == 0:
        raise UndefinedMetricError("zero mean")
    if np.ptp(x) == 0:
        return 0.0
    return float(x.std(ddof=1) / mean)


def rcv(values) -> float:
    """Robust coefficient of variation, MAD over median."""
    med, mad = median_and_mad(values)
    if med == 0:
        raise UndefinedMetricError("zero median")
    return mad / med


def _yearly_blocks(values, axis: TimeAxis, need: int):
    x = as_1d_float(values)
    if x.size != axis.length:
        raise ValueError(f"series has {x.size} values but axis has {axis.length} hours")
    years = complete_years(axis)
    if len(years) < need:
        raise InsufficientSpanError(
            f"insufficient span: need {need} complete calendar year(s), found {len(years)}")
    return x, years


def mav(values, axis: TimeAxis) -> float:
    """Mean over complete years of each year's standard deviation divided by its mean."""
    x, years = _yearly_blocks(values, axis, 1)
    ratios = []
    for p in years:
        block = x[p.start:p.stop]
        m = block.mean()
        if m == 0:
            raise UndefinedMetricError(f"zero mean in year {p.label}")
        ratios.append(block.std(ddof=1) / m)
    return float(np.mean(ratios))


def iav(values, axis: TimeAxis) -> float:
    """Standard deviation of annual means divided by the overall mean of complete years."""
    x, years = _yearly_blocks(values, axis, 2)
    annual = np.array([x[p.start:p.stop].mean() for p in years])
    overall = np.concatenate([x[p.start:p.stop] for p in years]).mean()
    if overall == 0:
        raise UndefinedMetricError("zero mean")
    return float(annual.std(ddof=1) / overall)


def mv_sv(values, axis: TimeAxis) -> tuple[float, float]:
    """Monthly and seasonal variability from climatological (all-years pooled) means."""
    x, years = _yearly_blocks(values, axis, 1)
    idx = np.concatenate([np.arange(p.start, p.stop) for p in years])
    pooled = x[idx]
    months = axis.times[idx].astype("datetime64[M]").astype(np.int64) % 12
    sums = np.bincount(months, weights=pooled, minlength=12)
    counts = np.bincount(months, minlength=12)
    overall = pooled.mean()
    if overall == 0:
        raise UndefinedMetricError("zero mean")
    monthly = sums / counts
    # DJF = (Dec, Jan, Feb), MAM, JJA, SON
    season_of_month = ((np.arange(12) + 1) % 12) // 3
    seasonal = np.array([sums[season_of_month == k].sum() / counts[season_of_month == k].sum()
                         for k in range(4)])
    return (float((monthly.max() - monthly.min()) / overall),
            float((seasonal.max() - seasonal.min()) / overall))


def jcv(x, y) -> float:
    """Bivariate coefficient of variation combining both variances and the covariance."""
    x, y = check_paired(x, y, 3)
    mx, my = x.mean(), y.mean()
    cov = np.cov(x, y, ddof=1)
    sxx, syy, sxy = float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1])
    if sxx == 0 or syy == 0 or np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedMetricError("singular covariance: constant series")
    one_minus_r2 = 1.0 - sxy * sxy / (sxx * syy)
    if one_minus_r2 < _SINGULAR_RTOL:
        # exact linear dependence: the denominator vanishes too for y = c*x, define as 0
        return 0.0
    numerator = sxx * syy * one_minus_r2
    denominator = mx * mx * syy - 2.0 * mx * my * sxy + my * my * sxx
    if not denominator > 0:
        raise UndefinedMetricError("non-positive denominator")
    return math.sqrt(numerator / denominator)


def jcv_univariate(values) -> float:
    """The multivariate coefficient of variation evaluated for a single variable."""
    x = as_1d_float(values, min_length=2)
    mean = x.mean()
    s2 = x.var(ddof=1)
    if s2 == 0 or mean == 0:
        raise UndefinedMetricError("singular covariance" if s2 == 0 else "zero mean")
    return math.sqrt(1.0 / (mean * (1.0 / s2) * mean))


@dataclass(frozen=True)
class VariabilitySummary:
    scale: TimeScale
    n: int
    mean: float
    cv: "float | Undefined"
    rcv: "float | Undefined"
    percentiles: dict = field(default_factory=dict)
    mav: "float | Undefined | None" = None
    iav: "float | Undefined | None" = None
    mv: "float | Undefined | None" = None
    sv: "float | Undefined | None" = None


def _period_values(values, axis: TimeAxis, scale: TimeScale) -> np.ndarray:
    if scale is TimeScale.HOURLY:
        return as_1d_float(values)
    return aggregate(values, axis, scale).values


def summarize(values, axis: TimeAxis, scale: "TimeScale | str" = TimeScale.HOURLY,
              qs=DEFAULT_QUANTILES, *, include_yearly: bool = True) -> VariabilitySummary:
    """All univariate metrics of ``values`` at one time scale.

    ``cv``, ``rcv`` and the percentiles describe the period means at
    ``scale``; ``mav``, ``iav``, ``mv`` and ``sv`` always come from the
    hourly values and are repeated at every scale (left ``None`` when
    ``include_yearly`` is false).
    """
    scale = TimeScale.parse(scale)
    v = _period_values(values, axis, scale)

    summary = VariabilitySummary(
        scale=scale, n=int(v.size), mean=float(v.mean()),
        cv=evaluate(cv, v) if v.size > 1 else Undefined("single value"),
        rcv=evaluate(rcv, v), percentiles=percentiles(v, qs))
    if not include_yearly:
        return summary
    mvsv = yearly_metric(mv_sv, values, axis)
    mv_, sv_ = (mvsv, mvsv) if isinstance(mvsv, Undefined) else mvsv
    return replace(summary, mav=yearly_metric(mav, values, axis),
                   iav=yearly_metric(iav, values, axis), mv=mv_, sv=sv_)


def yearly_metric(func, values, axis: TimeAxis):
    """``func(values, axis)`` with undefined or insufficient-span outcomes as :class:`Undefined`."""
    try:
        return func(values, axis)
    except UndefinedMetricError as exc:
        return Undefined(exc.reason)
    except InsufficientSpanError:
        return Undefined("insufficient span")


def joint_variability(x, y, axis: TimeAxis, scale: "TimeScale | str") -> "float | Undefined":
    """``jcv`` of two hourly series after averaging both to ``scale``."""
    scale = TimeScale.parse(scale)
    px, py = _period_values(x, axis, scale), _period_values(y, axis, scale)
    if px.size < 3:
        return Undefined(f"only {px.size} {scale.value} periods")
    return evaluate(jcv, px, py)


__all__ = [
    "DEFAULT_QUANTILES", "VariabilitySummary", "cv", "iav", "jcv", "jcv_univariate",
    "joint_variability", "mav", "median", "median_and_mad", "mv_sv", "percentiles", "rcv",
    "summarize", "yearly_metric",
]
