"""Manifest-driven evaluation of every metric over a set of grid points.

Points are independent, so the pipeline parallelises across points only and
gathers results back in manifest order before anything is written. Output
files contain no timestamps; identical inputs give byte-identical files
whatever the worker count.
"""

from __future__ import annotations

import configparser
import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ._validation import Undefined
from .association import correlate_at_scale
from .events import EventReport, Thresholds, event_report
from .power import (ALPHA_T_INTERPRETATIONS, RHO_DEFAULT, MonthlyEnergyTable, PowerCurve,
                    PvFarmConfig, monthly_energy, wind_power_density)
from .series import (InsufficientSpanError, ResourceSeries, SeriesLoadError, TimeScale,
                     read_series_csv)
from .variability import (DEFAULT_QUANTILES, iav, joint_variability, mav, mv_sv, summarize,
                          yearly_metric)

log = logging.getLogger(__name__)

VARIABLES = ("wp", "sp")
_PER_SCALE_STATS = ("mean", "cv", "rcv", *(f"p{q}" for q in DEFAULT_QUANTILES))
_YEARLY_STATS = ("mav", "iav", "mv", "sv")
CORRELATION_METRICS = ("pearson", "kendall", "cmed")

#: closed registry of metric names, in output order
METRIC_REGISTRY = (
    *(f"{v}_{s}" for v in VARIABLES for s in _PER_SCALE_STATS + _YEARLY_STATS),
    "jcv",
    *CORRELATION_METRICS,
)
METRIC_FAMILIES = {
    "stats": tuple(m for m in METRIC_REGISTRY if m.startswith(VARIABLES)) + ("jcv",),
    "correlate": CORRELATION_METRICS,
}

METRICS_HEADER = ("point_id", "lat", "lon", "metric", "scale", "value", "status")
EVENTS_HEADER = (
    "point_id", "lat", "lon", "n_hours", "wcs", "scw", "uws", "sws", "both_available",
    "wp_mean", "sp_mean", "eligible_wind", "eligible_solar",
    "d_nw_runs", "d_nw_mean", "d_nw_max", "d_ns_runs", "d_ns_mean", "d_ns_max",
    "d_joint_runs", "d_joint_mean", "d_joint_max",
)
ENERGY_HEADER = ("point_id", "year", "month", "hours", "complete", "wind_gwh", "solar_gwh",
                 "combined_gwh")
FAILURES_HEADER = ("point_id", "error")


class ManifestError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class RunError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# manifest

@dataclass(frozen=True)
class GridPoint:
    point_id: str
    lat: float
    lon: float
    series_path: Path


@dataclass(frozen=True)
class GridManifest:
    points: tuple[GridPoint, ...]
    units: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def point(self, point_id: str) -> GridPoint:
        for p in self.points:
            if p.point_id == point_id:
                return p
        raise KeyError(f"no point {point_id!r} in manifest")

    def subset(self, ids) -> "GridManifest":
        return GridManifest(tuple(self.point(i) for i in ids), self.units)


def _parse_coord(text: str, name: str, limit: float, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ManifestError(f"line {lineno}: {name} {text!r} is not a number") from None
    if not -limit <= value <= limit:
        raise ManifestError(f"line {lineno}: {name} {value} outside [-{limit:g}, {limit:g}]")
    return value


def load_manifest(path, *, check_files: bool = True) -> GridManifest:
    """Read a ``point_id,lat,lon,series_path`` manifest with ``# key: value`` unit declarations.

    Relative series paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ManifestError(f"{path}: {exc.strerror or exc}") from None
    units = {}
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            key, sep, val = line.lstrip("#").partition(":")
            if sep:
                units[key.strip()] = val.strip()
            body_start = i + 1
        elif line.strip():
            break
        else:
            body_start = i + 1
    rows = list(csv.reader(lines[body_start:]))
    if not rows or [c.strip() for c in rows[0]] != ["point_id", "lat", "lon", "series_path"]:
        raise ManifestError(f"{path}: line {body_start + 1}: expected header point_id,lat,lon,series_path")
    points, seen, missing = [], set(), []
    for offset, row in enumerate(rows[1:]):
        lineno = body_start + 2 + offset
        if not row or not "".join(row).strip():
            continue
        if len(row) != 4:
            raise ManifestError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
        pid, lat, lon, spath = (c.strip() for c in row)
        if not pid:
            raise ManifestError(f"{path}: line {lineno}: empty point_id")
        if pid in seen:
            raise ManifestError(f"{path}: line {lineno}: duplicate point_id {pid!r}")
        seen.add(pid)
        series_path = Path(spath)
        if not series_path.is_absolute():
            series_path = path.parent / series_path
        if check_files and not series_path.is_file():
            missing.append(str(series_path))
        points.append(GridPoint(pid, _parse_coord(lat, "lat", 90, lineno),
                                _parse_coord(lon, "lon", 180, lineno), series_path))
    if not points:
        raise ManifestError(f"{path}: no points")
    if missing:
        raise ManifestError(f"{path}: missing series files: {', '.join(missing)}")
    return GridManifest(tuple(points), units)


# ---------------------------------------------------------------------------
# configuration

# key, default, description with provenance of the default
CONFIG_KEYS = (
    ("wp_l", "280", "wind power density threshold, W/m^2 (upper limit of the poor wind power class)"),
    ("sp_l", "125", "irradiance threshold, W/m^2 (upper limit of the poor solar resource class, NREL)"),
    ("rho", str(RHO_DEFAULT), "air density, kg/m^3 (constant offshore value; 1.225 in the Rayleigh identity)"),
    ("shear_exponent", "0.0", "power-law exponent for 100 m -> hub height (0 = use 100 m winds; 0.11 typical offshore)"),
    ("metrics", "all", f"comma list from the metric registry, or 'all' ({len(METRIC_REGISTRY)} metrics)"),
    ("scales", "hourly, seasonal, annual", "comma list of hourly, daily, monthly, seasonal, annual"),
    ("output_dir", "out", "directory for metrics.csv, events.csv, energy.csv, failures.csv"),
    ("workers", "1", "worker processes (env SYNERGY_GRID_WORKERS or --workers override)"),
    ("format", "csv", "csv or csv+raster"),
    ("events", "true", "write per-point complementarity/persistence report"),
    ("energy_points", "all", "points for the monthly energy table: all, none, or comma list of ids"),
    ("power_curve", "generic 8 MW", "speed:kW pairs; default is a cubic-ramp 8 MW curve, not a certified one"),
    ("cut_in", "4.0", "turbine cut-in speed, m/s"),
    ("rated_speed", "13.0", "turbine rated speed, m/s"),
    ("cut_out", "25.0", "turbine cut-out speed, m/s"),
    ("hub_height", "105.0", "turbine hub height, m (8 MW class offshore turbine)"),
    ("pv_p_stc", "220", "PV module rated power, W (SPR-220 class module)"),
    ("pv_alpha_t", "-0.041", "module temperature coefficient as printed on the data sheet"),
    ("pv_alpha_t_interpretation", "deci", f"reading of pv_alpha_t: {', '.join(ALPHA_T_INTERPRETATIONS)} "
                                          "(deci = -0.41 %/degC)"),
    ("pv_eta", "0.85", "overall PV system performance factor"),
    ("pv_n", "36364", "module count (8 MW / 220 W)"),
    ("pv_c0", "2.0458", "floating module temperature model intercept, degC"),
    ("pv_c1", "0.9458", "ambient temperature coefficient"),
    ("pv_c2", "0.0215", "irradiance coefficient, degC m^2/W"),
    ("pv_c3", "1.2376", "10 m wind speed cooling coefficient, degC s/m"),
)
_CONFIG_NAMES = {k for k, _, _ in CONFIG_KEYS}


def config_help() -> str:
    width = max(len(k) for k, _, _ in CONFIG_KEYS)
    lines = ["config keys (key = value, one per line; '#' comments):"]
    for key, default, doc in CONFIG_KEYS:
        lines.append(f"  {key:<{width}}  default {default}: {doc}")
    return "\n".join(lines)


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    rho: float = RHO_DEFAULT
    curve: PowerCurve = field(default_factory=PowerCurve.generic)
    pv: PvFarmConfig = field(default_factory=PvFarmConfig)
    shear_exponent: float = 0.0
    metrics: tuple[str, ...] = METRIC_REGISTRY
    scales: tuple[TimeScale, ...] = (TimeScale.HOURLY, TimeScale.SEASONAL, TimeScale.ANNUAL)
    output_dir: Path = Path("out")
    workers: int = 1
    raster: bool = False
    events: bool = True
    energy_points: "tuple[str, ...] | None" = None   # None means every point

    def __post_init__(self):
        unknown = [m for m in self.metrics if m not in METRIC_REGISTRY]
        if unknown:
            raise ConfigError(f"unknown metric(s): {', '.join(unknown)}")
        if int(self.workers) < 1:
            raise ConfigError("workers must be >= 1")
        if not self.rho > 0:
            raise ConfigError("rho must be positive")

    def wants_energy(self, point_id: str) -> bool:
        return self.energy_points is None or point_id in self.energy_points


def _parse_curve(text: str, cut_in: float, rated: float, cut_out: float, hub: float) -> PowerCurve:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        speed, sep, power = item.partition(":")
        if not sep:
            raise ConfigError(f"power_curve entry {item!r} is not speed:kW")
        pairs.append((float(speed), float(power)))
    return PowerCurve.from_pairs(pairs, cut_in=cut_in, rated=rated, cut_out=cut_out, hub_height=hub)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_config(text: str, base_dir: Path | None = None) -> PipelineConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string("[pipeline]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    raw = dict(parser["pipeline"])
    unknown = sorted(set(raw) - _CONFIG_NAMES)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    def num(key, default, kind=float):
        try:
            return kind(raw.get(key, default))
        except ValueError:
            raise ConfigError(f"{key}: {raw[key]!r} is not a valid {kind.__name__}") from None

    try:
        cut_in, rated = num("cut_in", 4.0), num("rated_speed", 13.0)
        cut_out, hub = num("cut_out", 25.0), num("hub_height", 105.0)
        if "power_curve" in raw:
            curve = _parse_curve(raw["power_curve"], cut_in, rated, cut_out, hub)
        else:
            curve = PowerCurve.generic(cut_in=cut_in, rated=rated, cut_out=cut_out, hub_height=hub)
        pv = PvFarmConfig(
            p_stc=num("pv_p_stc", 220.0), alpha_t=num("pv_alpha_t", -0.041),
            alpha_t_interpretation=raw.get("pv_alpha_t_interpretation", "deci"),
            eta=num("pv_eta", 0.85), n_pv=num("pv_n", 36_364, int),
            c0=num("pv_c0", 2.0458), c1=num("pv_c1", 0.9458),
            c2=num("pv_c2", 0.0215), c3=num("pv_c3", 1.2376))
        thresholds = Thresholds(num("wp_l", 280.0), num("sp_l", 125.0))
        scales = tuple(TimeScale.parse(s) for s in _split(raw.get("scales", "hourly,seasonal,annual")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    metrics_text = raw.get("metrics", "all").strip()
    metrics = METRIC_REGISTRY if metrics_text == "all" else tuple(_split(metrics_text))
    fmt = raw.get("format", "csv").strip()
    if fmt not in ("csv", "csv+raster"):
        raise ConfigError(f"format must be csv or csv+raster, got {fmt!r}")
    energy_text = raw.get("energy_points", "all").strip()
    energy_points = None if energy_text == "all" else (
        () if energy_text == "none" else tuple(_split(energy_text)))
    out = Path(raw.get("output_dir", "out"))
    if base_dir is not None and not out.is_absolute():
        out = base_dir / out
    events_text = raw.get("events", "true").strip().lower()
    if events_text not in ("true", "false", "yes", "no", "1", "0"):
        raise ConfigError(f"events must be true or false, got {events_text!r}")
    return PipelineConfig(
        thresholds=thresholds, rho=num("rho", RHO_DEFAULT), curve=curve, pv=pv,
        shear_exponent=num("shear_exponent", 0.0), metrics=metrics, scales=scales,
        output_dir=out, workers=num("workers", 1, int), raster=fmt == "csv+raster",
        events=events_text in ("true", "yes", "1"), energy_points=energy_points)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_config(text, base_dir=path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# per-point evaluation

class MetricCell(NamedTuple):
    metric: str
    scale: str
    value: "float | Undefined"


@dataclass
class PointResult:
    point: GridPoint
    metrics: list[MetricCell] = field(default_factory=list)
    events: EventReport | None = None
    energy: MonthlyEnergyTable | None = None
    wp_mean: float | None = None
    sp_mean: float | None = None
    error: str | None = None


def load_point_series(point: GridPoint, units: dict) -> ResourceSeries:
    return read_series_csv(point.series_path, ssrd_units=units.get("ssrd_units"),
                           t2m_units=units.get("t2m_units"))


def _undefined(exc: Exception) -> Undefined:
    if isinstance(exc, InsufficientSpanError):
        return Undefined("insufficient span")
    return Undefined(str(exc))


def _univariate_cells(name: str, values, axis, scales, wanted) -> list[MetricCell]:
    cells = []
    for scale in scales:
        try:
            s = summarize(values, axis, scale, include_yearly=False)
            stats = {"mean": s.mean, "cv": s.cv, "rcv": s.rcv,
                     **{f"p{q}": v for q, v in s.percentiles.items()}}
        except InsufficientSpanError as exc:
            stats = dict.fromkeys(_PER_SCALE_STATS, _undefined(exc))
        cells += [MetricCell(f"{name}_{stat}", scale.value, stats[stat])
                  for stat in _PER_SCALE_STATS if f"{name}_{stat}" in wanted]
    hourly = TimeScale.HOURLY.value
    for stat, func in (("mav", mav), ("iav", iav)):
        if f"{name}_{stat}" in wanted:
            cells.append(MetricCell(f"{name}_{stat}", hourly, yearly_metric(func, values, axis)))
    if f"{name}_mv" in wanted or f"{name}_sv" in wanted:
        both = yearly_metric(mv_sv, values, axis)
        for stat, value in zip(("mv", "sv"), (both, both) if isinstance(both, Undefined) else both):
            if f"{name}_{stat}" in wanted:
                cells.append(MetricCell(f"{name}_{stat}", hourly, value))
    return cells


def compute_point(point: GridPoint, config: PipelineConfig, units: dict) -> PointResult:
    """Evaluate every requested metric for one point; failures are captured, not raised."""
    result = PointResult(point)
    try:
        series = load_point_series(point, units)
        wp = wind_power_density(series.u100, config.rho)
        sp = np.asarray(series.ssrd)
        axis = series.axis
        result.wp_mean, result.sp_mean = float(wp.mean()), float(sp.mean())
        wanted = set(config.metrics)
        cells = []
        for name, values in (("wp", wp), ("sp", sp)):
            cells += _univariate_cells(name, values, axis, config.scales, wanted)
        if "jcv" in wanted:
            for scale in config.scales:
                try:
                    value = joint_variability(wp, sp, axis, scale)
                except InsufficientSpanError as exc:
                    value = _undefined(exc)
                cells.append(MetricCell("jcv", scale.value, value))
        corr = [m for m in CORRELATION_METRICS if m in wanted]
        for scale in config.scales if corr else ():
            try:
                triples = correlate_at_scale(wp, sp, axis, scale)
            except InsufficientSpanError as exc:
                cells += [MetricCell(m, scale.value, _undefined(exc)) for m in corr]
                continue
            for t in triples:
                cells += [MetricCell(m, t.scale_label, t[m]) for m in corr]
        order = {m: i for i, m in enumerate(METRIC_REGISTRY)}
        result.metrics = sorted(cells, key=lambda c: order[c.metric])
        if config.events:
            result.events = event_report(wp, sp, config.thresholds)
        if config.wants_energy(point.point_id):
            result.energy = monthly_energy(series, config.curve, config.pv, config.shear_exponent)
    except (SeriesLoadError, ValueError, ArithmeticError, OSError) as exc:
        return PointResult(point, error=f"{type(exc).__name__}: {exc}")
    return result


# ---------------------------------------------------------------------------
# orchestration

@dataclass
class RunResult:
    points: list[PointResult]

    @property
    def failures(self) -> list[PointResult]:
        return [p for p in self.points if p.error is not None]

    @property
    def succeeded(self) -> list[PointResult]:
        return [p for p in self.points if p.error is None]

    def metric_grids(self) -> list["MetricGrid"]:
        return metric_grids(self)


def resolve_workers(requested: int | None, config: PipelineConfig) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("SYNERGY_GRID_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SYNERGY_GRID_WORKERS={env!r} is not an integer") from None
    return config.workers


def run(manifest: GridManifest, config: PipelineConfig, workers: int | None = None) -> RunResult:
    """Evaluate all points; results come back in manifest order regardless of scheduling."""
    n_workers = resolve_workers(workers, config)
    points = list(manifest.points)
    if n_workers == 1 or len(points) == 1:
        results = [compute_point(p, config, manifest.units) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(points))) as pool:
            results = list(pool.map(compute_point, points, repeat(config), repeat(manifest.units),
                                    chunksize=max(1, len(points) // (4 * n_workers))))
    for r in results:
        if r.error:
            log.warning("point %s failed: %s", r.point.point_id, r.error)
    return RunResult(results)


# ---------------------------------------------------------------------------
# output

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _status(value) -> tuple[str, str]:
    if isinstance(value, Undefined):
        return "", f"undefined:{value.reason}"
    if value is None or not math.isfinite(value):
        return "", "undefined:non-finite"
    return _fmt(value), "ok"


@dataclass(frozen=True)
class MetricGrid:
    """One metric at one scale across the manifest's points."""

    metric: str
    scale: str
    cells: tuple[tuple[str, float, float, "float | Undefined"], ...]

    def values(self) -> dict[str, "float | Undefined"]:
        return {pid: v for pid, _, _, v in self.cells}


def metric_grids(result: RunResult) -> list[MetricGrid]:
    grouped: dict[tuple[str, str], list] = {}
    for pr in result.succeeded:
        for cell in pr.metrics:
            grouped.setdefault((cell.metric, cell.scale), []).append(
                (pr.point.point_id, pr.point.lat, pr.point.lon, cell.value))
    return [MetricGrid(m, s, tuple(c)) for (m, s), c in grouped.items()]


def _metric_rows(grids):
    for g in grids:
        for pid, lat, lon, value in g.cells:
            text, status = _status(value)
            yield (pid, _fmt(lat), _fmt(lon), g.metric, g.scale, text, status)


def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _ensure_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RunError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from None
    if not os.access(out_dir, os.W_OK):
        raise RunError(f"output directory {out_dir} is not writable")
    return out_dir


def write_metric_grid(grids, out_dir, fmt: str = "csv", filename: str = "metrics.csv") -> list[Path]:
    """Write one or more grids as long-format CSV, plus PGM rasters when ``fmt == "csv+raster"``."""
    if isinstance(grids, MetricGrid):
        grids = [grids]
    if fmt not in ("csv", "csv+raster"):
        raise ValueError(f"unknown format {fmt!r}")
    out_dir = _ensure_dir(out_dir)
    rows = sorted(_metric_rows(grids), key=_row_order(grids))
    written = [_write_csv(out_dir / filename, METRICS_HEADER, rows)]
    if fmt == "csv+raster":
        for g in grids:
            written += write_raster(g, out_dir / "maps")
    return written


def _row_order(grids):
    # point-major in first-seen order, then metric registry order, then scale order as produced
    point_rank, cell_rank = {}, {}
    for g in grids:
        for pid, *_ in g.cells:
            point_rank.setdefault(pid, len(point_rank))
        cell_rank.setdefault((g.metric, g.scale), len(cell_rank))
    reg = {m: i for i, m in enumerate(METRIC_REGISTRY)}
    return lambda row: (point_rank[row[0]], reg.get(row[3], len(reg)), cell_rank[(row[3], row[4])])


def read_metrics_csv(path) -> list[MetricGrid]:
    """Parse a metrics file written by :func:`write_metric_grid` back into grids."""
    grouped: dict[tuple[str, str], list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != METRICS_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for pid, lat, lon, metric, scale, value, status in reader:
            v = float(value) if status == "ok" else Undefined(status.partition(":")[2])
            grouped.setdefault((metric, scale), []).append((pid, float(lat), float(lon), v))
    return [MetricGrid(m, s, tuple(c)) for (m, s), c in grouped.items()]


def _regular_axis(values: np.ndarray) -> np.ndarray | None:
    u = np.unique(values)
    if u.size == 1:
        return u
    steps = np.diff(u)
    if np.allclose(steps, steps[0], rtol=1e-6, atol=1e-9):
        return u
    return None


def write_raster(grid: MetricGrid, maps_dir) -> list[Path]:
    """Grayscale PGM of ``grid`` on its regular lat/lon lattice plus a legend sidecar.

    Defined cells map linearly from [min, max] to grey levels 1..255 (all 255
    when min == max); 0 marks undefined cells and lattice nodes without a
    point. Rows run north to south, columns west to east. Irregular grids are
    skipped and return no files.
    """
    lats = np.array([c[1] for c in grid.cells])
    lons = np.array([c[2] for c in grid.cells])
    ulat, ulon = _regular_axis(lats), _regular_axis(lons)
    if ulat is None or ulon is None:
        log.info("grid %s/%s is not regular; raster skipped", grid.metric, grid.scale)
        return []
    ulat = ulat[::-1]
    defined = [v for *_, v in grid.cells if not isinstance(v, Undefined) and math.isfinite(v)]
    vmin = min(defined) if defined else 0.0
    vmax = max(defined) if defined else 0.0
    image = np.zeros((ulat.size, ulon.size), dtype=np.int64)
    for _, lat, lon, v in grid.cells:
        if isinstance(v, Undefined) or not math.isfinite(v):
            continue
        i = int(np.argmin(np.abs(ulat - lat)))
        j = int(np.argmin(np.abs(ulon - lon)))
        image[i, j] = 255 if vmax == vmin else 1 + int(round(254 * (v - vmin) / (vmax - vmin)))
    maps_dir = _ensure_dir(maps_dir)
    stem = f"{grid.metric}_{grid.scale.replace(':', '-')}"
    pgm = maps_dir / f"{stem}.pgm"
    with open(pgm, "w") as fh:
        fh.write(f"P2\n{ulon.size} {ulat.size}\n255\n")
        for row in image:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
    legend = maps_dir / f"{stem}.legend.txt"
    legend.write_text(
        f"metric: {grid.metric}\nscale: {grid.scale}\nmin: {_fmt(vmin)}\nmax: {_fmt(vmax)}\n"
        "scaling: grey = 1 + round(254 * (value - min) / (max - min)); 255 everywhere if min == max\n"
        "nodata: 0\n"
        f"rows: lat {_fmt(ulat[0])} (top) to {_fmt(ulat[-1])} (bottom), {ulat.size} rows\n"
        f"cols: lon {_fmt(ulon[0])} (left) to {_fmt(ulon[-1])} (right), {ulon.size} cols\n")
    return [pgm, legend]


def _duration_fields(stats):
    if stats is None:
        return ("", "", "")
    return (_fmt(stats.n_runs), _fmt(stats.mean), _fmt(stats.max))


def _event_rows(result: RunResult):
    for pr in result.succeeded:
        rep = pr.events
        if rep is None:
            continue
        ix = rep.indices
        yield (pr.point.point_id, _fmt(pr.point.lat), _fmt(pr.point.lon), _fmt(ix.n_hours),
               _fmt(ix.wcs), _fmt(ix.scw), _fmt(ix.uws), _fmt(ix.sws), _fmt(ix.both_available),
               _fmt(pr.wp_mean), _fmt(pr.sp_mean), _fmt(rep.eligible_wind), _fmt(rep.eligible_solar),
               *_duration_fields(rep.durations.wind), *_duration_fields(rep.durations.solar),
               *_duration_fields(rep.durations.joint))


def _energy_rows(result: RunResult):
    for pr in result.succeeded:
        if pr.energy is None:
            continue
        for r in pr.energy:
            yield (pr.point.point_id, str(r.year), str(r.month), str(r.hours), _fmt(r.complete),
                   _fmt(r.wind_gwh), _fmt(r.solar_gwh), _fmt(r.combined_gwh))


def write_outputs(result: RunResult, out_dir, fmt: str = "csv") -> list[Path]:
    """Write metrics, events, energy and failures files for a run."""
    out_dir = _ensure_dir(out_dir)
    written = write_metric_grid(metric_grids(result), out_dir, fmt)
    written.append(_write_csv(out_dir / "events.csv", EVENTS_HEADER, _event_rows(result)))
    written.append(_write_csv(out_dir / "energy.csv", ENERGY_HEADER, _energy_rows(result)))
    written.append(_write_csv(out_dir / "failures.csv", FAILURES_HEADER,
                              ((p.point.point_id, p.error) for p in result.failures)))
    return written


def with_metrics(config: PipelineConfig, metrics, *, events: bool, energy: bool) -> PipelineConfig:
    """Copy of ``config`` restricted to a subset of the outputs (used by the CLI subcommands)."""
    return replace(config, metrics=tuple(metrics), events=events,
                   energy_points=config.energy_points if energy else ())
