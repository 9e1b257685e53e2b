"""Regenerate the two-point sample grid shipped with the package."""

from pathlib import Path

from synergy.series import write_series_csv
from synergy.synthetic import SiteClimate, synthetic_series, years_axis

HERE = Path(__file__).resolve().parent
SITES = {
    "gulf": (42.75, 4.25, SiteClimate(mean_wind=9.75), 1),
    "aegean": (38.0, 25.5, SiteClimate(mean_wind=8.5, wind_annual_amp=-0.2, cloudiness=0.1), 2),
}

if __name__ == "__main__":
    axis = years_axis(2001, 2)
    (HERE / "series").mkdir(exist_ok=True)
    lines = ["# ssrd_units: W_per_m2", "# t2m_units: C", "point_id,lat,lon,series_path"]
    for pid, (lat, lon, climate, seed) in SITES.items():
        write_series_csv(HERE / "series" / f"{pid}.csv", synthetic_series(axis, climate, seed))
        lines.append(f"{pid},{lat},{lon},series/{pid}.csv")
    (HERE / "manifest.csv").write_text("\n".join(lines) + "\n")
