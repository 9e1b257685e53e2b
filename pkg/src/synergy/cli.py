"""Command-line front end.

``--point`` switches a command to single-point mode, which prints
human-readable tables to standard output. Without it the command runs over
the whole manifest and writes files into the output directory. Diagnostics
always go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from ._validation import Undefined
from .association import ESTIMATORS, agreement_table, correlate_at_scale
from .events import event_report
from .pipeline import (METRIC_FAMILIES, ConfigError, GridManifest, ManifestError,
                       PipelineConfig, RunError, config_help, load_config, load_manifest,
                       load_point_series, resolve_workers, run, with_metrics, write_outputs)
from .power import monthly_energy, wind_power_density
from .series import SeriesLoadError
from .variability import summarize

log = logging.getLogger("synergy")

COMMANDS = {
    "validate": "check the manifest and every series file",
    "stats": "variability metrics (CV, RCV, MAV, IAV, MV, SV, percentiles, JCV)",
    "correlate": "Pearson, Kendall tau-b and median-based correlation plus agreement counts",
    "events": "complementarity/synergy indices and below-threshold persistence",
    "energy": "monthly wind, solar and combined energy yield",
    "run-all": "every metric, event report and energy table",
}


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", type=Path, help="grid manifest CSV (point_id,lat,lon,series_path)")
    common.add_argument("--config", type=Path, help="pipeline config file (key = value)")
    common.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    common.add_argument("--point", help="single-point mode: print tables for this point id")
    common.add_argument("--workers", type=int, help="worker processes (overrides SYNERGY_GRID_WORKERS)")
    common.add_argument("--format", choices=("csv", "csv+raster"), help="grid output format")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="synergy", description="Wind/solar variability, complementarity and yield over gridded hourly series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name, summary in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=summary, description=summary,
                       epilog=config_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def _load_inputs(args) -> tuple[GridManifest, PipelineConfig]:
    if args.manifest is None:
        raise UsageError("--manifest is required")
    manifest = load_manifest(args.manifest)
    config = load_config(args.config) if args.config else PipelineConfig()
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    if args.format is not None:
        config = replace(config, raster=args.format == "csv+raster")
    return manifest, config


def _cell(value, width=10) -> str:
    if value is None:
        return "n/a".rjust(width)
    if isinstance(value, Undefined):
        return "undef".rjust(width)
    if isinstance(value, bool):
        return str(value).rjust(width)
    return f"{value:{width}.4g}"


def _print_table(header, rows, out) -> None:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    out.write("  ".join(str(h).rjust(w) for h, w in zip(header, widths)) + "\n")
    for r in rows:
        out.write("  ".join(str(c).rjust(w) for c, w in zip(r, widths)) + "\n")


def _point_stats(series, config, out) -> None:
    wp = wind_power_density(series.u100, config.rho)
    for name, values in (("WP (W/m^2)", wp), ("SP (W/m^2)", series.ssrd)):
        out.write(f"{name}\n")
        rows = []
        for scale in config.scales:
            try:
                s = summarize(values, series.axis, scale)
            except ValueError as exc:
                log.warning("%s at %s scale: %s", name, scale.value, exc)
                continue
            rows.append([scale.value, s.n, _cell(s.mean), _cell(s.cv), _cell(s.rcv),
                         *(_cell(v) for v in s.percentiles.values()),
                         _cell(s.mav), _cell(s.iav), _cell(s.mv), _cell(s.sv)])
        _print_table(["scale", "n", "mean", "cv", "rcv", "p50", "p75", "p90", "p95",
                      "mav", "iav", "mv", "sv"], rows, out)
        out.write("\n")


def _point_correlate(series, config, out) -> None:
    wp = wind_power_density(series.u100, config.rho)
    rows = []
    for scale in config.scales:
        try:
            triples = correlate_at_scale(wp, series.ssrd, series.axis, scale)
        except ValueError as exc:
            log.warning("%s scale: %s", scale.value, exc)
            continue
        rows += [[t.scale_label, t.n, _cell(t.pearson), _cell(t.kendall), _cell(t.cmed)] for t in triples]
    _print_table(["scale", "n", "pearson", "kendall", "cmed"], rows, out)


def _point_events(series, config, out) -> None:
    wp = wind_power_density(series.u100, config.rho)
    rep = event_report(wp, series.ssrd, config.thresholds)
    out.write(f"thresholds: WP_L={config.thresholds.wp_l:g} W/m^2  SP_L={config.thresholds.sp_l:g} W/m^2\n")
    _print_table(["wcs", "scw", "uws", "sws", "both"],
                 [[_cell(rep.wcs), _cell(rep.scw), _cell(rep.uws), _cell(rep.sws), _cell(rep.both_available)]],
                 out)
    out.write(f"eligible: wind={rep.eligible_wind} solar={rep.eligible_solar}\n")
    rows = []
    for label, stats in (("wind off", rep.durations.wind), ("solar off", rep.durations.solar),
                         ("both off", rep.durations.joint)):
        if stats is None:
            rows.append([label, "n/a", "n/a", "n/a"])
        else:
            rows.append([label, stats.n_runs, _cell(stats.mean), _cell(stats.max)])
    _print_table(["duration", "runs", "mean h", "max h"], rows, out)


def _point_energy(series, config, out) -> None:
    table = monthly_energy(series, config.curve, config.pv, config.shear_exponent)
    rows = [[f"{r.year}-{r.month:02d}", r.hours, "" if r.complete else "partial",
             f"{r.wind_gwh:.4f}", f"{r.solar_gwh:.4f}", f"{r.combined_gwh:.4f}"] for r in table]
    _print_table(["month", "hours", "flag", "wind GWh", "solar GWh", "combined GWh"], rows, out)


_POINT_VIEWS = {
    "stats": [_point_stats],
    "correlate": [_point_correlate],
    "events": [_point_events],
    "energy": [_point_energy],
    "run-all": [_point_stats, _point_correlate, _point_events, _point_energy],
}


def _single_point(args, manifest, config, out) -> int:
    try:
        point = manifest.point(args.point)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    series = load_point_series(point, manifest.units)
    out.write(f"point {point.point_id} ({point.lat:g}, {point.lon:g}): {len(series)} hours "
              f"from {series.axis.start}\n\n")
    for view in _POINT_VIEWS[args.command]:
        view(series, config, out)
        out.write("\n")
    return 0


def _grid_config(command: str, config: PipelineConfig) -> PipelineConfig:
    if command == "stats":
        return with_metrics(config, METRIC_FAMILIES["stats"], events=False, energy=False)
    if command == "correlate":
        return with_metrics(config, METRIC_FAMILIES["correlate"], events=False, energy=False)
    if command == "events":
        return with_metrics(config, (), events=True, energy=False)
    if command == "energy":
        return with_metrics(config, (), events=False, energy=True)
    return config


def _write_agreement(result, out_dir: Path) -> Path:
    by_scale: dict[str, list] = {}
    for pr in result.succeeded:
        cells = {(c.metric, c.scale): c.value for c in pr.metrics}
        for scale in dict.fromkeys(s for m, s in cells if m in ESTIMATORS):
            by_scale.setdefault(scale, []).append({m: cells[(m, scale)] for m in ESTIMATORS})
    path = out_dir / "agreement.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scale", "estimator", "tally", "count", "total"])
        for scale, dicts in by_scale.items():
            table = agreement_table(dicts)
            for est, tally, count in table.rows():
                w.writerow([scale, est, tally, count, table.total])
    return path


def _grid(args, manifest, config) -> int:
    workers = resolve_workers(args.workers, config)
    grid_config = _grid_config(args.command, config)
    started = time.perf_counter()
    result = run(manifest, grid_config, workers)
    elapsed = time.perf_counter() - started
    fmt = "csv+raster" if grid_config.raster else "csv"
    written = write_outputs(result, grid_config.output_dir, fmt)
    if args.command in ("correlate", "run-all"):
        written.append(_write_agreement(result, Path(grid_config.output_dir)))
    (Path(grid_config.output_dir) / "run.log").write_text(
        f"command: {args.command}\npoints: {len(result.points)}\nfailed: {len(result.failures)}\n"
        f"workers: {workers}\nelapsed_s: {elapsed:.3f}\nfinished: {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
    for p in written:
        log.info("wrote %s", p)
    for f in result.failures:
        print(f"failed: {f.point.point_id}: {f.error}", file=sys.stderr)
    if result.points and not result.succeeded:
        print("error: every point failed", file=sys.stderr)
        return 1
    return 0


def _validate(manifest: GridManifest, out) -> int:
    rows, bad = [], 0
    for p in manifest.points:
        try:
            s = load_point_series(p, manifest.units)
            rows.append([p.point_id, "ok", len(s), str(s.axis.start), str(s.axis.end - 1 * s.axis.step)])
        except SeriesLoadError as exc:
            bad += 1
            rows.append([p.point_id, "invalid", "", "", ""])
            print(f"invalid: {exc}", file=sys.stderr)
    _print_table(["point_id", "status", "hours", "first", "last"], rows, out)
    return 1 if bad else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        manifest, config = _load_inputs(args)
        if args.command == "validate":
            return _validate(manifest, sys.stdout)
        if args.point is not None:
            return _single_point(args, manifest, config, sys.stdout)
        return _grid(args, manifest, config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"synergy: error: {exc}", file=sys.stderr)
        return 2
    except (ManifestError, ConfigError, SeriesLoadError, RunError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
