"""Deterministic synthetic hourly resource series for demos and test fixtures.

Wind speed is Rayleigh-like (the norm of two AR(1) Gaussian components)
with an annual cycle and a per-year level factor; irradiance follows a
half-sine daylight profile whose length and peak vary over the year, damped
by an AR(1) cloud factor. Nothing here claims to reproduce any real site.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .series import ResourceSeries, TimeAxis


@dataclass(frozen=True)
class SiteClimate:
    mean_wind: float = 7.5          # long-term mean 100 m speed, m/s
    wind_annual_amp: float = 0.15   # relative amplitude of the annual cycle (peak in mid-January)
    wind_year_cv: float = 0.03      # year-to-year relative spread of the wind level
    wind_memory: float = 0.97       # hourly AR(1) coefficient
    peak_irradiance: float = 900.0  # clear-sky noon peak at midsummer, W/m^2
    winter_peak_ratio: float = 0.45
    day_length_amp: float = 2.5     # hours of day-length swing around 12 h
    cloudiness: float = 0.25        # mean fractional cloud loss
    mean_temp: float = 19.0
    temp_annual_amp: float = 6.0


def _ar1(rng: np.random.Generator, n: int, phi: float) -> np.ndarray:
    """Unit-variance stationary AR(1) series."""
    e = rng.standard_normal(n) * np.sqrt(1.0 - phi * phi)
    z0 = rng.standard_normal()
    out, _ = lfilter([1.0], [1.0, -phi], e, zi=[phi * z0])
    return out


def synthetic_series(axis: TimeAxis, climate: SiteClimate | None = None, seed: int = 0) -> ResourceSeries:
    climate = climate or SiteClimate()
    rng = np.random.default_rng(seed)
    n = axis.length
    t = axis.times
    day = t.astype("datetime64[D]")
    doy = (day - day.astype("datetime64[Y]")).astype(np.int64).astype(float)
    hour = (t - day).astype(np.int64).astype(float)
    year_idx = t.astype("datetime64[Y]").astype(np.int64)

    years = np.unique(year_idx)
    level = 1.0 + climate.wind_year_cv * rng.standard_normal(years.size)
    year_level = level[np.searchsorted(years, year_idx)]
    cycle = 1.0 + climate.wind_annual_amp * np.cos(2 * np.pi * (doy - 15.0) / 365.25)
    # Rayleigh scale sigma gives mean sigma * sqrt(pi / 2)
    sigma = climate.mean_wind * cycle * year_level / np.sqrt(np.pi / 2)
    g1, g2 = _ar1(rng, n, climate.wind_memory), _ar1(rng, n, climate.wind_memory)
    u100 = sigma * np.hypot(g1, g2)

    season = np.sin(2 * np.pi * (doy - 80.0) / 365.25)
    # one extra hour covers the partially lit sunrise/sunset hours of hourly accumulations
    day_len = 13.0 + climate.day_length_amp * season
    sunrise = 12.0 - day_len / 2
    phase = (hour + 0.5 - sunrise) / day_len
    peak = climate.peak_irradiance * (1 + climate.winter_peak_ratio
                                      + (1 - climate.winter_peak_ratio) * season) / 2
    clear = np.where((phase > 0) & (phase < 1), peak * np.sin(np.pi * np.clip(phase, 0, 1)), 0.0)
    cloud = np.clip(1.0 - climate.cloudiness * (1.0 + _ar1(rng, n, 0.95)), 0.0, 1.0)
    ssrd = clear * cloud

    t2m = (climate.mean_temp + climate.temp_annual_amp * np.sin(2 * np.pi * (doy - 110.0) / 365.25)
           + 0.8 * _ar1(rng, n, 0.9))
    u10 = u100 * 0.1 ** 0.11
    return ResourceSeries(axis, u100, ssrd, t2m, u10, {"synthetic_seed": seed})


def years_axis(first_year: int, n_years: int) -> TimeAxis:
    """Hourly axis covering whole calendar years ``first_year .. first_year + n_years - 1``."""
    return TimeAxis.span(f"{first_year}-01-01T00", f"{first_year + n_years}-01-01T00")
