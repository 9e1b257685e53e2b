"""Acceptance criteria, one function each.

Run under pytest (a PASS/FAIL line per criterion appears in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from synergy.association import kendall_tau, pearson, r_cmed  # noqa: E402
from synergy.events import DurationStats, EventFlags, indices, run_lengths  # noqa: E402
from synergy.pipeline import PipelineConfig, load_manifest, run, write_outputs  # noqa: E402
from synergy.power import (PowerCurve, farm_pv_power, monthly_energy, pv_module_temperature,  # noqa: E402
                           pv_power, wind_power_density)
from synergy.series import TimeAxis, TimeScale  # noqa: E402
from synergy.synthetic import years_axis  # noqa: E402
from synergy.variability import cv, iav, jcv, mav, mv_sv, rcv  # noqa: E402

from conftest import constant_series, write_grid  # noqa: E402

RESULTS: list[str] = []
SEED = 20240611


def rel_close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def ac1_rayleigh():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    u = rng.rayleigh(6.2 / math.sqrt(math.pi / 2), 1_000_000)
    mean_wp = float(wind_power_density(u, 1.225).mean())
    elapsed = time.perf_counter() - t0
    assert abs(mean_wp - 280.0) <= 6.0, f"mean WPD {mean_wp:.2f}"
    assert elapsed < 5.0, f"{elapsed:.2f} s"
    return f"mean WPD {mean_wp:.2f} W/m^2 (280 +- 6), {elapsed:.2f} s"


def _kendall_brute(x, y):
    """All-pairs sign products; returns the integer numerator and tie counts."""
    dx = np.sign(x[:, None] - x[None, :])
    dy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(x.size, 1)
    dx, dy = dx[iu], dy[iu]
    s = int((dx * dy).sum())
    return s, int((dx == 0).sum()), int((dy == 0).sum())


def ac2_kendall():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(3, 201))
        if checked % 2:
            x, y = rng.integers(0, 6, n).astype(float), rng.integers(0, 6, n).astype(float)
        else:
            x, y = rng.normal(size=n), rng.normal(size=n)
        s, tx, ty = _kendall_brute(x, y)
        n0 = n * (n - 1) // 2
        if tx == n0 or ty == n0:
            continue
        expected = s / math.sqrt((n0 - tx) * (n0 - ty))
        got = kendall_tau(x, y)
        assert got == expected, f"n={n}: {got!r} != {expected!r}"
        checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, f"{elapsed:.2f} s"
    return f"{checked} instances identical to the quadratic oracle, {elapsed:.2f} s"


def ac3_event_algebra():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        n = int(rng.integers(1, 2000))
        p = rng.uniform(0, 1, 2)
        idx = indices(EventFlags(rng.random(n) < p[0], rng.random(n) < p[1]))
        ex = idx.exact()
        assert ex["wcs"] + ex["scw"] + ex["uws"] + ex["both_available"] == 1
        assert ex["sws"] == ex["wcs"] + ex["scw"]
        assert idx.n_wind_only + idx.n_solar_only + idx.n_neither + idx.n_both == n
        assert ex["sws"] == Fraction(idx.n_exactly_one, n)
    return "1000 sequences: partition sums to 1 and sws = wcs + scw exactly"


def _scan(mask):
    runs, cur = [], 0
    for v in mask:
        if v:
            cur += 1
        elif cur:
            runs.append(cur)
            cur = 0
    if cur:
        runs.append(cur)
    return runs


def ac4_durations():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        n = int(rng.integers(0, 1500))
        w = rng.random(n) < rng.uniform(0.05, 0.95)
        s = rng.random(n) < rng.uniform(0.05, 0.95)
        for off in (~w, ~s, ~w & ~s):
            brute = _scan(off.tolist())
            assert run_lengths(off).tolist() == brute
            stats = DurationStats.from_mask(off)
            assert stats.n_runs == len(brute) and stats.total_hours == sum(brute) == int(off.sum())
            if brute:
                assert stats.max == max(brute) and stats.mean == sum(brute) / len(brute)
    return "1000 sequences x 3 streams equal the brute-force scanner"


def ac5_scale_invariance():
    rng = np.random.default_rng(SEED)
    axis = years_axis(2001, 3)
    checks = 0
    for _ in range(10):
        x = rng.gamma(2.0, 50.0, axis.length)
        y = 0.3 * x + rng.gamma(2.0, 50.0, axis.length)
        c, a, b = rng.uniform(0.01, 100, 3)
        for f in (cv, rcv):
            assert rel_close(f(c * x), f(x)), f.__name__
        for f in (mav, iav):
            assert rel_close(f(c * x, axis), f(x, axis)), f.__name__
        for u, v in zip(mv_sv(c * x, axis), mv_sv(x, axis)):
            assert rel_close(u, v), "mv/sv"
        sub_x, sub_y = x[:2000], y[:2000]
        assert rel_close(jcv(a * sub_x, b * sub_y), jcv(sub_x, sub_y)), "jcv"
        shift = rng.uniform(-100, 100)
        for f in (pearson, kendall_tau, r_cmed):
            assert rel_close(f(a * sub_x + shift, sub_y), f(sub_x, sub_y)), f.__name__
            assert rel_close(f(sub_x, b * sub_y + shift), f(sub_x, sub_y)), f.__name__
        checks += 1
    return f"{checks} fixtures: all metrics invariant to 1e-12 relative"


def ac6_degenerate():
    rng = np.random.default_rng(SEED)
    x = rng.gamma(2.0, 10.0, 1000)
    for c in (0.1, 2.0, 37.5):
        assert jcv(x, c * x) == 0.0
    assert r_cmed(x, x) == 1.0 and r_cmed(x, -x) == -1.0
    assert rcv(np.full(100, 7.3)) == 0.0
    axis = years_axis(2001, 1)
    d = np.arange(axis.length) / 24.0
    for _ in range(1000):
        amp, phase, noise = rng.uniform(0, 0.9), rng.uniform(0, 365), rng.uniform(0, 2)
        series = 10 * (1 + amp * np.sin(2 * np.pi * (d - phase) / 365)) + noise * rng.gamma(1.0, 1.0, axis.length)
        mv, sv = mv_sv(series, axis)
        assert mv >= sv, f"mv {mv} < sv {sv}"
    return "jcv(x, cx) = 0, cmed +-1, rcv(const) = 0, MV >= SV on 1000 fixtures"


def ac7_pv_chain():
    assert abs(pv_power(1000.0, 25.0) - 187.0) <= 1e-9
    assert abs(farm_pv_power(1000.0, 25.0) - 36_364 * 187.0) <= 1e-9 * 36_364 * 187.0
    assert abs(pv_module_temperature(20.0, 1000.0, 5.0) - 36.2738) <= 1e-9
    assert abs(pv_module_temperature(25.0, 0.0, 0.0) - 25.6908) <= 1e-9
    return "187 W per module, 6.800068 MW farm, T_mod spot values within 1e-9"


def ac8_energy():
    axis = TimeAxis("2001-06-01T00", 720)
    (row,) = monthly_energy(constant_series(axis, u100=13.0, ssrd=350.0), PowerCurve.generic()).rows
    assert row.wind_gwh == 5.76, row.wind_gwh
    assert row.combined_gwh == row.wind_gwh + row.solar_gwh
    table = monthly_energy(constant_series(years_axis(2001, 1), u100=9.0, ssrd=200.0), PowerCurve.generic())
    assert all(r.combined_gwh == r.wind_gwh + r.solar_gwh for r in table)
    return f"720 h at rated speed = {row.wind_gwh} GWh; combined = wind + solar exactly"


def ac9_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        corrupt = {"P017", "P060"}
        manifest = load_manifest(write_grid(tmp / "grid", 100, years=1, corrupt=corrupt))
        cfg = PipelineConfig(scales=(TimeScale.MONTHLY, TimeScale.SEASONAL, TimeScale.ANNUAL))
        files = {}
        for workers in (1, 8):
            out = tmp / f"out{workers}"
            result = run(manifest, cfg, workers)
            write_outputs(result, out, "csv+raster")
            assert sorted(p.point.point_id for p in result.failures) == sorted(corrupt)
            assert len(result.succeeded) == 98
            files[workers] = {p.relative_to(out): p.read_bytes() for p in out.rglob("*") if p.is_file()}
        assert files[1] == files[8], "outputs differ between worker counts"
    return f"{len(files[1])} output files byte-identical for 1 vs 8 workers; 2 corrupt points isolated"


def ac10_robustness():
    rng = np.random.default_rng(SEED)
    x = rng.normal(100.0, 10.0, 10_000)
    y = x.copy()
    hit = rng.choice(x.size, 100, replace=False)
    y[hit] *= 100.0
    d_rcv = abs(rcv(y) / rcv(x) - 1)
    d_cv = abs(cv(y) / cv(x) - 1)
    assert d_rcv < 0.05 and d_cv > 0.5, f"rcv {d_rcv:.3%}, cv {d_cv:.1%}"
    return f"rcv changes {d_rcv:.2%} (< 5%), cv changes {d_cv:.0%} (> 50%)"


CRITERIA = [
    (1, "Rayleigh closed form", ac1_rayleigh),
    (2, "Kendall tau oracle equivalence", ac2_kendall),
    (3, "Event-index algebra", ac3_event_algebra),
    (4, "Duration oracle", ac4_durations),
    (5, "Scale invariance", ac5_scale_invariance),
    (6, "Degenerate identities", ac6_degenerate),
    (7, "PV chain", ac7_pv_chain),
    (8, "Energy integration", ac8_energy),
    (9, "Pipeline determinism", ac9_determinism),
    (10, "Robustness", ac10_robustness),
]


def evaluate_criterion(number, title, func) -> tuple[bool, str]:
    try:
        detail = func()
        ok = True
    except AssertionError as exc:
        detail, ok = f"assertion failed: {exc}", False
    line = f"AC{number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    return ok, line


@pytest.mark.parametrize("number, title, func", CRITERIA, ids=[f"AC{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, func):
    ok, line = evaluate_criterion(number, title, func)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for number, title, func in CRITERIA:
        ok, line = evaluate_criterion(number, title, func)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
