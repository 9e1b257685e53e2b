"""Variability, correlation, complementarity and hybrid energy yield of wind and solar resources."""

__version__ = "0.1.0"

from ._validation import Undefined, UndefinedMetricError
from .association import (AgreementTable, CorrelationTriple, agreement_table, correlate_at_scale,
                          kendall_tau, pearson, r_cmed)
from .events import (EventFlags, EventReport, Thresholds, classify_events, durations, eligibility,
                     event_report, indices)
from .power import (MonthlyEnergyTable, PowerCurve, PvFarmConfig, farm_pv_power, mean_power_density,
                    mean_turbine_power, monthly_energy, pv_module_temperature, pv_power,
                    shear_extrapolate, turbine_power, wind_power_density)
from .series import (AggregatedSeries, ResourceSeries, TimeAxis, TimeScale, aggregate,
                     normalize_irradiance, read_series_csv, season_partition)
from .variability import cv, iav, jcv, mav, median_and_mad, mv_sv, percentiles, rcv, summarize

__all__ = [
    "AgreementTable", "AggregatedSeries", "CorrelationTriple", "EventFlags", "EventReport",
    "MonthlyEnergyTable", "PowerCurve", "PvFarmConfig", "ResourceSeries", "Thresholds", "TimeAxis",
    "TimeScale", "Undefined", "UndefinedMetricError", "aggregate", "agreement_table",
    "classify_events", "correlate_at_scale", "cv", "durations", "eligibility", "event_report",
    "farm_pv_power", "iav", "indices", "jcv", "kendall_tau", "mav", "mean_power_density",
    "mean_turbine_power", "median_and_mad", "monthly_energy", "mv_sv", "normalize_irradiance",
    "pearson", "percentiles", "pv_module_temperature", "pv_power", "r_cmed", "rcv",
    "read_series_csv", "season_partition", "shear_extrapolate", "summarize", "turbine_power",
    "wind_power_density",
]
