"""scikit-learn compatible wrappers around the functional API.

The estimators follow the usual conventions: constructor arguments are
stored untouched, learned quantities end in ``_``, ``fit`` returns ``self``
and arrays are checked with :func:`sklearn.utils.validation.check_array`.
They compose with :class:`sklearn.pipeline.Pipeline` and
:func:`sklearn.base.clone`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import Undefined, evaluate
from .association import kendall_tau, pearson, r_cmed
from .events import Thresholds, event_report
from .power import (RHO_DEFAULT, PowerCurve, PvFarmConfig, farm_pv_power, pv_module_temperature,
                    shear_extrapolate, turbine_power, wind_power_density)
from .variability import DEFAULT_QUANTILES, cv, jcv, median_and_mad, percentiles, rcv


def _column(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"{name} must be a single column, got shape {X.shape}")
    return check_array(X.reshape(-1, 1), ensure_min_samples=1)[:, 0]


def _two_columns(X, min_samples=1):
    X = check_array(X, ensure_min_samples=min_samples)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (wind, solar), got {X.shape[1]}")
    return X[:, 0], X[:, 1]


class WindPowerDensity(TransformerMixin, BaseEstimator):
    """Stateless transformer from wind speed (m/s) to power density (W/m^2)."""

    def __init__(self, rho=RHO_DEFAULT):
        self.rho = rho

    def fit(self, X, y=None):
        check_array(X, ensure_2d=False)
        return self

    def transform(self, X):
        X = check_array(X, ensure_2d=False)
        return wind_power_density(X, self.rho)


class VariabilityProfile(BaseEstimator):
    """Univariate spread statistics of one sample.

    Attributes
    ----------
    median_, mad_ : float
    cv_, rcv_ : float or Undefined
    percentiles_ : dict
        Percent level to value.
    """

    def __init__(self, quantiles=DEFAULT_QUANTILES):
        self.quantiles = quantiles

    def fit(self, X, y=None):
        x = _column(X)
        self.median_, self.mad_ = median_and_mad(x)
        self.cv_ = evaluate(cv, x) if x.size > 1 else Undefined("single value")
        self.rcv_ = evaluate(rcv, x)
        self.percentiles_ = percentiles(x, self.quantiles)
        self.n_samples_ = x.size
        return self


class JointVariability(BaseEstimator):
    """Joint coefficient of variation of a two-column sample."""

    def fit(self, X, y=None):
        a, b = _two_columns(X, 3)
        self.jcv_ = evaluate(jcv, a, b)
        return self


class CorrelationProfile(BaseEstimator):
    """Pearson, Kendall tau-b and median-based correlation between ``X`` and ``y``."""

    def fit(self, X, y):
        x = _column(X)
        y = _column(y, "y")
        self.pearson_ = evaluate(pearson, x, y)
        self.kendall_ = evaluate(kendall_tau, x, y)
        self.cmed_ = evaluate(r_cmed, x, y)
        return self


class ComplementarityAnalyzer(TransformerMixin, BaseEstimator):
    """Event-based complementarity of hourly wind power density and irradiance.

    ``X`` has two columns, wind power density and irradiance, both in W/m^2.
    ``transform`` returns the per-hour availability flags as a ``(n, 2)``
    boolean array.
    """

    def __init__(self, wp_l=280.0, sp_l=125.0):
        self.wp_l = wp_l
        self.sp_l = sp_l

    def fit(self, X, y=None):
        wp, sp = _two_columns(X)
        report = event_report(wp, sp, Thresholds(self.wp_l, self.sp_l))
        self.report_ = report
        self.wcs_ = report.wcs
        self.scw_ = report.scw
        self.uws_ = report.uws
        self.sws_ = report.sws
        self.both_available_ = report.both_available
        self.eligible_wind_ = report.eligible_wind
        self.eligible_solar_ = report.eligible_solar
        self.durations_ = report.durations
        return self

    def transform(self, X):
        check_is_fitted(self, "report_")
        wp, sp = _two_columns(X)
        return np.column_stack([wp > self.wp_l, sp > self.sp_l])


class HybridYieldModel(BaseEstimator):
    """Hourly output of one turbine and a floating PV farm.

    ``X`` columns are ``u100`` (m/s), irradiance (W/m^2), ambient temperature
    (degC) and 10 m wind speed (m/s). ``predict`` returns a ``(n, 2)`` array
    of wind and solar power in kW.
    """

    def __init__(self, curve=None, pv=None, shear_exponent=0.0):
        self.curve = curve
        self.pv = pv
        self.shear_exponent = shear_exponent

    def fit(self, X=None, y=None):
        self.curve_ = self.curve if self.curve is not None else PowerCurve.generic()
        self.pv_ = self.pv if self.pv is not None else PvFarmConfig()
        return self

    def predict(self, X):
        check_is_fitted(self, "curve_")
        X = check_array(X)
        if X.shape[1] != 4:
            raise ValueError("expected columns u100, ssrd, t2m, u10")
        u100, g, t_a, u10 = X.T
        wind_kw = turbine_power(shear_extrapolate(u100, self.curve_.hub_height, self.shear_exponent),
                                self.curve_)
        t_mod = pv_module_temperature(t_a, g, u10, self.pv_)
        solar_kw = farm_pv_power(g, t_mod, self.pv_) / 1000.0
        return np.column_stack([wind_kw, solar_kw])
