"""Wind power density, turbine and floating-PV power, and monthly energy yield."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_1d_float
from .series import TimeScale, ResourceSeries, period_table

RHO_DEFAULT = 1.2258
RHO_STANDARD = 1.225

# data-sheet literal and the scale applied to it under each reading
ALPHA_T_LITERAL = -0.041
ALPHA_T_INTERPRETATIONS = {
    "fraction": 1.0,    # -0.041 per degC: output vanishes near 49 degC
    "percent": 0.01,    # -0.041 %/degC
    "deci": 0.1,        # -0.41 %/degC, typical for crystalline silicon
}


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not rho > 0:
        raise ValueError(f"air density must be positive, got {rho}")
    return rho


def wind_power_density(u, rho: float = RHO_DEFAULT):
    """Kinetic power per unit swept area, ``0.5 * rho * u**3`` in W/m^2."""
    rho = _check_rho(rho)
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0):
        raise ValueError("wind speed must be non-negative")
    out = 0.5 * rho * arr ** 3
    return float(out) if out.ndim == 0 else out


def mean_power_density(wp) -> float:
    return float(as_1d_float(wp, "power density series").mean())


def rayleigh_mean_power_density(mean_speed: float, rho: float = RHO_DEFAULT) -> float:
    """Closed-form mean power density for Rayleigh-distributed speeds: ``(3/pi) rho u_mean**3``."""
    return 3.0 / np.pi * _check_rho(rho) * float(mean_speed) ** 3


def shear_extrapolate(u100, target_height: float, exponent: float = 0.0, ref_height: float = 100.0):
    """Power-law extrapolation of 100 m wind speeds to ``target_height``."""
    if target_height <= 0:
        raise ValueError("target height must be positive")
    arr = np.asarray(u100, dtype=float)
    if np.any(arr < 0):
        raise ValueError("wind speed must be non-negative")
    out = arr * (target_height / ref_height) ** exponent
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PowerCurve:
    """Tabulated turbine power curve (speeds in m/s, power in kW).

    Output is zero below ``cut_in`` and at or above ``cut_out``, linear
    between tabulated points, and ``rated_power`` on ``[rated, cut_out)``.
    """

    speeds: tuple[float, ...]
    powers: tuple[float, ...]
    cut_in: float
    rated: float
    cut_out: float
    hub_height: float = 100.0

    def __post_init__(self):
        s = np.asarray(self.speeds, dtype=float)
        p = np.asarray(self.powers, dtype=float)
        if s.ndim != 1 or s.size < 2 or s.size != p.size:
            raise ValueError("power curve needs at least two (speed, power) points of equal count")
        if np.any(np.diff(s) <= 0):
            raise ValueError("power curve speeds must be strictly increasing")
        if np.any(p < 0):
            raise ValueError("power curve values must be non-negative")
        if not 0 <= self.cut_in < self.rated < self.cut_out:
            raise ValueError("need 0 <= cut_in < rated < cut_out")
        ramp = (s >= self.cut_in) & (s <= self.rated)
        if np.any(np.diff(p[ramp]) < 0):
            raise ValueError("power must be non-decreasing between cut-in and rated speed")
        if self.rated > s[-1]:
            raise ValueError("power curve must tabulate up to the rated speed")
        if self.hub_height <= 0:
            raise ValueError("hub height must be positive")
        object.__setattr__(self, "speeds", tuple(s.tolist()))
        object.__setattr__(self, "powers", tuple(p.tolist()))

    @property
    def rated_power(self) -> float:
        return float(max(self.powers))

    @classmethod
    def from_pairs(cls, pairs, *, cut_in: float, rated: float, cut_out: float,
                   hub_height: float = 100.0) -> "PowerCurve":
        pairs = sorted((float(a), float(b)) for a, b in pairs)
        return cls(tuple(a for a, _ in pairs), tuple(b for _, b in pairs),
                   cut_in, rated, cut_out, hub_height)

    @classmethod
    def generic(cls, rated_power: float = 8000.0, cut_in: float = 4.0, rated: float = 13.0,
                cut_out: float = 25.0, hub_height: float = 105.0, step: float = 0.5) -> "PowerCurve":
        """Cubic-ramp curve for a generic turbine; not any manufacturer's certified curve."""
        speeds = np.arange(0.0, rated + step / 2, step)
        frac = np.clip((speeds ** 3 - cut_in ** 3) / (rated ** 3 - cut_in ** 3), 0.0, 1.0)
        return cls(tuple(speeds.tolist()), tuple((rated_power * frac).tolist()),
                   cut_in, rated, cut_out, hub_height)


def turbine_power(u_hub, curve: PowerCurve):
    """Electrical output in kW for hub-height speeds ``u_hub``."""
    u = np.asarray(u_hub, dtype=float)
    p = np.interp(u, curve.speeds, curve.powers)
    p = np.where(u >= curve.rated, curve.rated_power, p)
    p = np.where((u < curve.cut_in) | (u >= curve.cut_out), 0.0, p)
    return float(p) if p.ndim == 0 else p


def mean_turbine_power(u_hub, curve: PowerCurve) -> float:
    u = as_1d_float(u_hub, "hub-height wind speed", nonnegative=True)
    return float(turbine_power(u, curve).mean())


@dataclass(frozen=True)
class PvFarmConfig:
    """Floating PV farm parameters.

    ``alpha_t`` holds the temperature coefficient exactly as printed on the
    module data sheet (``-0.041`` "per degC"); ``alpha_t_interpretation``
    selects how that literal is read, see :data:`ALPHA_T_INTERPRETATIONS`.
    Power always falls with module temperature above STC regardless of the
    sign convention of the literal.
    """

    p_stc: float = 220.0
    alpha_t: float = ALPHA_T_LITERAL
    alpha_t_interpretation: str = "deci"
    eta: float = 0.85
    n_pv: int = 36_364
    c0: float = 2.0458
    c1: float = 0.9458
    c2: float = 0.0215
    c3: float = 1.2376
    g_stc: float = field(default=1000.0, init=False)
    t_stc: float = field(default=25.0, init=False)

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if not self.p_stc > 0:
            raise ValueError("p_stc must be positive")
        if int(self.n_pv) < 1 or int(self.n_pv) != self.n_pv:
            raise ValueError("n_pv must be a positive integer")
        if self.alpha_t_interpretation not in ALPHA_T_INTERPRETATIONS:
            raise ValueError(f"alpha_t_interpretation must be one of {sorted(ALPHA_T_INTERPRETATIONS)}")

    @property
    def temperature_coefficient(self) -> float:
        """Magnitude of the power loss per degC above STC, as a fraction."""
        return abs(self.alpha_t) * ALPHA_T_INTERPRETATIONS[self.alpha_t_interpretation]

    @property
    def farm_rated_power(self) -> float:
        return self.n_pv * self.p_stc


def pv_module_temperature(t_a, g, u10, cfg: PvFarmConfig | None = None):
    """Empirical floating-module temperature in degC from ambient temperature, irradiance and 10 m wind."""
    cfg = cfg or PvFarmConfig()
    g = np.asarray(g, dtype=float)
    u10 = np.asarray(u10, dtype=float)
    if np.any(g < 0) or np.any(u10 < 0):
        raise ValueError("irradiance and wind speed must be non-negative")
    out = cfg.c0 + cfg.c1 * np.asarray(t_a, dtype=float) + cfg.c2 * g - cfg.c3 * u10
    return float(out) if out.ndim == 0 else out


def pv_power(g, t_mod, cfg: PvFarmConfig | None = None):
    """Per-module output in W, clamped at zero when the temperature derating exceeds 100%."""
    cfg = cfg or PvFarmConfig()
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("irradiance must be non-negative")
    derate = 1.0 - cfg.temperature_coefficient * (np.asarray(t_mod, dtype=float) - cfg.t_stc)
    out = np.maximum(cfg.eta * (g / cfg.g_stc) * cfg.p_stc * derate, 0.0)
    return float(out) if out.ndim == 0 else out


def farm_pv_power(g, t_mod, cfg: PvFarmConfig | None = None):
    cfg = cfg or PvFarmConfig()
    return cfg.n_pv * pv_power(g, t_mod, cfg)


@dataclass(frozen=True)
class MonthlyEnergyRow:
    year: int
    month: int
    hours: int
    complete: bool
    wind_gwh: float
    solar_gwh: float

    @property
    def combined_gwh(self) -> float:
        return self.wind_gwh + self.solar_gwh


@dataclass(frozen=True)
class MonthlyEnergyTable:
    rows: tuple[MonthlyEnergyRow, ...]

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def incomplete(self) -> list[str]:
        return [f"{r.year}-{r.month:02d}" for r in self.rows if not r.complete]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def hourly_wind_power(series: ResourceSeries, curve: PowerCurve, shear_exponent: float = 0.0):
    """Turbine output (kW) for every hour of ``series``."""
    u_hub = shear_extrapolate(series.u100, curve.hub_height, shear_exponent)
    return turbine_power(u_hub, curve)


def hourly_solar_power(series: ResourceSeries, cfg: PvFarmConfig):
    """Farm PV output (W) for every hour of ``series``."""
    t_mod = pv_module_temperature(series.t2m, series.ssrd, series.u10, cfg)
    return farm_pv_power(series.ssrd, t_mod, cfg)


def monthly_energy(series: ResourceSeries, curve: PowerCurve, cfg: PvFarmConfig | None = None,
                   shear_exponent: float = 0.0) -> MonthlyEnergyTable:
    """Integrate hourly wind and PV output per calendar month, in GWh.

    Partial months at the ends of the series are kept and marked
    ``complete=False``.
    """
    cfg = cfg or PvFarmConfig()
    wind_kw = hourly_wind_power(series, curve, shear_exponent)
    solar_w = hourly_solar_power(series, cfg)
    rows = []
    for p in period_table(series.axis, TimeScale.MONTHLY):
        year, month = (int(v) for v in p.label.split("-"))
        wind = float(wind_kw[p.start:p.stop].sum()) / 1e6
        solar = float(solar_w[p.start:p.stop].sum()) / 1e9
        rows.append(MonthlyEnergyRow(year, month, p.hours, p.complete, wind, solar))
    return MonthlyEnergyTable(tuple(rows))
