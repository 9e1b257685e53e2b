from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from synergy.series import ResourceSeries, TimeAxis, write_series_csv
from synergy.synthetic import SiteClimate, synthetic_series, years_axis


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def two_year_axis() -> TimeAxis:
    return years_axis(2001, 2)


@pytest.fixture(scope="session")
def synthetic_point(two_year_axis) -> ResourceSeries:
    return synthetic_series(two_year_axis, seed=7)


def constant_series(axis: TimeAxis, u100=8.0, ssrd=200.0, t2m=20.0, u10=6.0) -> ResourceSeries:
    n = axis.length
    return ResourceSeries(axis, np.full(n, u100), np.full(n, ssrd), np.full(n, t2m), np.full(n, u10))


def write_grid(directory: Path, n_points: int, *, years: int = 2, first_year: int = 2001,
               corrupt: set[str] = frozenset(), climate: SiteClimate | None = None) -> Path:
    """Write ``n_points`` synthetic series on a regular lattice plus a manifest; return the manifest path."""
    directory.mkdir(parents=True, exist_ok=True)
    series_dir = directory / "series"
    series_dir.mkdir(exist_ok=True)
    axis = years_axis(first_year, years)
    side = int(np.ceil(np.sqrt(n_points)))
    lines = ["# ssrd_units: W_per_m2", "# t2m_units: C", "point_id,lat,lon,series_path"]
    for k in range(n_points):
        pid = f"P{k:03d}"
        path = series_dir / f"{pid}.csv"
        if pid in corrupt:
            path.write_text("timestamp,u100,ssrd,t2m,u10\n2001-01-01T00:00:00Z,1,2\n")
        else:
            write_series_csv(path, synthetic_series(axis, climate, seed=k))
        lat = 35.0 + 0.25 * (k // side)
        lon = 10.0 + 0.25 * (k % side)
        lines.append(f"{pid},{lat},{lon},series/{pid}.csv")
    manifest = directory / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
