import csv

import numpy as np
import pytest

from synergy._validation import Undefined
from synergy.events import Thresholds
from synergy.pipeline import (METRIC_REGISTRY, ConfigError, GridPoint, ManifestError, MetricGrid,
                              PipelineConfig, RunError, RunResult, compute_point, config_help,
                              load_manifest, parse_config, read_metrics_csv, resolve_workers, run,
                              with_metrics, write_metric_grid, write_outputs, write_raster)
from synergy.series import TimeScale, write_series_csv
from synergy.synthetic import years_axis

from conftest import constant_series, write_grid


@pytest.fixture(scope="module")
def small_grid(tmp_path_factory):
    return write_grid(tmp_path_factory.mktemp("grid"), 6, corrupt={"P004"})


def manifest_text(tmp_path, body, header="point_id,lat,lon,series_path"):
    (tmp_path / "a.csv").write_text("")
    path = tmp_path / "m.csv"
    path.write_text(f"# ssrd_units: W_per_m2\n{header}\n{body}")
    return path


class TestManifest:
    def test_loads(self, small_grid):
        m = load_manifest(small_grid)
        assert len(m) == 6 and m.units == {"ssrd_units": "W_per_m2", "t2m_units": "C"}
        assert m.point("P001").series_path.is_file()
        assert [p.point_id for p in m.subset(["P002", "P000"]).points] == ["P002", "P000"]

    def test_bad_header(self, tmp_path):
        with pytest.raises(ManifestError, match="expected header"):
            load_manifest(manifest_text(tmp_path, "A,1,2,a.csv\n", header="id,lat,lon,path"))

    def test_duplicate(self, tmp_path):
        with pytest.raises(ManifestError, match="line 4: duplicate"):
            load_manifest(manifest_text(tmp_path, "A,1,2,a.csv\nA,1,3,a.csv\n"))

    def test_coordinate_range(self, tmp_path):
        with pytest.raises(ManifestError, match="lat 91.0 outside"):
            load_manifest(manifest_text(tmp_path, "A,91,2,a.csv\n"))
        with pytest.raises(ManifestError, match="not a number"):
            load_manifest(manifest_text(tmp_path, "A,x,2,a.csv\n"))

    def test_missing_files_listed(self, tmp_path):
        with pytest.raises(ManifestError, match="missing series files: .*b.csv.*c.csv"):
            load_manifest(manifest_text(tmp_path, "A,1,2,b.csv\nB,1,3,c.csv\n"))
        assert len(load_manifest(manifest_text(tmp_path, "A,1,2,b.csv\n"), check_files=False)) == 1

    def test_empty(self, tmp_path):
        with pytest.raises(ManifestError, match="no points"):
            load_manifest(manifest_text(tmp_path, ""))

    def test_field_count(self, tmp_path):
        with pytest.raises(ManifestError, match="expected 4 fields"):
            load_manifest(manifest_text(tmp_path, "A,1,2\n"))


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.thresholds == Thresholds(280.0, 125.0)
        assert cfg.rho == 1.2258 and cfg.metrics == METRIC_REGISTRY
        assert cfg.curve.rated_power == 8000.0
        assert cfg.scales == (TimeScale.HOURLY, TimeScale.SEASONAL, TimeScale.ANNUAL)

    def test_values(self, tmp_path):
        cfg = parse_config("wp_l = 300\nrho = 1.225  # standard sea-level value\nscales = monthly, annual\n"
                           "metrics = wp_cv, jcv\nformat = csv+raster\nenergy_points = P001\n"
                           "power_curve = 0:0, 4:0, 10:2000, 12:3000\nrated_speed = 12\n"
                           "pv_alpha_t_interpretation = percent\noutput_dir = results\n", tmp_path)
        assert cfg.thresholds.wp_l == 300.0 and cfg.rho == 1.225
        assert cfg.scales == (TimeScale.MONTHLY, TimeScale.ANNUAL)
        assert cfg.metrics == ("wp_cv", "jcv") and cfg.raster
        assert cfg.wants_energy("P001") and not cfg.wants_energy("P002")
        assert cfg.curve.rated_power == 3000.0
        assert cfg.pv.temperature_coefficient == pytest.approx(0.00041)
        assert cfg.output_dir == tmp_path / "results"

    @pytest.mark.parametrize("text, match", [
        ("wp_lim = 3", "unknown config key"),
        ("metrics = wp_cv, wp_kurtosis", "unknown metric"),
        ("rho = heavy", "not a valid float"),
        ("rho = -1", "rho must be positive"),
        ("scales = fortnightly", "fortnightly"),
        ("format = png", "format"),
        ("workers = 0", "workers"),
        ("events = maybe", "events"),
        ("power_curve = 0:0, 3", "power_curve"),
    ])
    def test_errors(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_help_lists_every_key(self):
        text = config_help()
        for key in ("wp_l", "sp_l", "rho", "pv_alpha_t_interpretation", "energy_points"):
            assert key in text

    def test_workers_env(self, monkeypatch):
        cfg = PipelineConfig(workers=2)
        monkeypatch.delenv("SYNERGY_GRID_WORKERS", raising=False)
        assert resolve_workers(None, cfg) == 2
        monkeypatch.setenv("SYNERGY_GRID_WORKERS", "5")
        assert resolve_workers(None, cfg) == 5
        assert resolve_workers(3, cfg) == 3
        monkeypatch.setenv("SYNERGY_GRID_WORKERS", "many")
        with pytest.raises(ConfigError):
            resolve_workers(None, cfg)


class TestComputePoint:
    def test_full_registry(self, small_grid):
        m = load_manifest(small_grid)
        r = compute_point(m.point("P000"), PipelineConfig(), m.units)
        assert r.error is None
        assert {c.metric for c in r.metrics} == set(METRIC_REGISTRY)
        scales = {c.scale for c in r.metrics if c.metric == "kendall"}
        assert scales == {"hourly", "annual", "seasonal:DJF", "seasonal:MAM", "seasonal:JJA", "seasonal:SON"}
        # two complete years: annual correlation needs three
        annual = [c.value for c in r.metrics if c.metric == "pearson" and c.scale == "annual"]
        assert isinstance(annual[0], Undefined)
        assert r.events is not None and len(r.energy) == 24

    def test_corrupt_point_captured(self, small_grid):
        m = load_manifest(small_grid)
        r = compute_point(m.point("P004"), PipelineConfig(), m.units)
        assert r.error.startswith("SeriesLoadError") and r.metrics == []

    def test_zero_irradiance_gives_undefined_cells(self, tmp_path):
        axis = years_axis(2001, 1)
        write_series_csv(tmp_path / "z.csv", constant_series(axis, ssrd=0.0))
        pt = GridPoint("Z", 0.0, 0.0, tmp_path / "z.csv")
        r = compute_point(pt, PipelineConfig(scales=(TimeScale.MONTHLY,)), {})
        cells = {(c.metric, c.scale): c.value for c in r.metrics}
        assert isinstance(cells[("sp_rcv", "monthly")], Undefined)
        assert cells[("sp_rcv", "monthly")].reason == "zero median"
        assert cells[("wp_cv", "monthly")] == 0.0
        assert isinstance(cells[("sp_iav", "hourly")], Undefined)
        assert cells[("sp_iav", "hourly")].reason == "insufficient span"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunAndOutputs:
    def test_run_isolation_and_files(self, small_grid, tmp_path):
        m = load_manifest(small_grid)
        result = run(m, PipelineConfig(scales=(TimeScale.MONTHLY, TimeScale.ANNUAL)), workers=1)
        assert [p.point.point_id for p in result.points] == [f"P{k:03d}" for k in range(6)]
        assert [p.point.point_id for p in result.failures] == ["P004"]
        written = write_outputs(result, tmp_path / "out")
        assert [p.name for p in written] == ["metrics.csv", "events.csv", "energy.csv", "failures.csv"]
        metrics = read_rows(tmp_path / "out" / "metrics.csv")
        assert {r[0] for r in metrics[1:]} == {"P000", "P001", "P002", "P003", "P005"}
        assert all(r[6] == "ok" or r[6].startswith("undefined:") for r in metrics[1:])
        assert not any(r[5].lower() in ("nan", "inf") for r in metrics[1:])
        assert read_rows(tmp_path / "out" / "failures.csv")[1][0] == "P004"
        energy = read_rows(tmp_path / "out" / "energy.csv")
        assert len(energy) == 1 + 5 * 24
        for row in energy[1:]:
            assert float(row[7]) == float(row[5]) + float(row[6])

    def test_metrics_round_trip(self, small_grid, tmp_path):
        m = load_manifest(small_grid)
        result = run(m, PipelineConfig(scales=(TimeScale.MONTHLY,)), workers=1)
        grids = result.metric_grids()
        write_metric_grid(grids, tmp_path)
        back = {(g.metric, g.scale): g for g in read_metrics_csv(tmp_path / "metrics.csv")}
        for g in grids:
            other = back[(g.metric, g.scale)]
            for (pid, lat, lon, v), (pid2, lat2, lon2, v2) in zip(g.cells, other.cells):
                assert (pid, lat, lon) == (pid2, lat2, lon2)
                assert v == v2 if not isinstance(v, Undefined) else v2 == v

    def test_subcommand_restriction(self, small_grid):
        m = load_manifest(small_grid).subset(["P000"])
        cfg = with_metrics(PipelineConfig(scales=(TimeScale.ANNUAL,)), ("wp_cv",), events=False, energy=False)
        (r,) = run(m, cfg).points
        assert [c.metric for c in r.metrics] == ["wp_cv"] and r.events is None and r.energy is None

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(RunError):
            write_outputs(RunResult([]), blocker / "sub")


class TestRaster:
    def grid(self, values):
        cells, k = [], 0
        for i in range(2):
            for j in range(3):
                cells.append((f"P{k}", 40.0 + 0.5 * i, 10.0 + 0.5 * j, values[k]))
                k += 1
        return MetricGrid("wp_cv", "annual", tuple(cells))

    def read_pgm(self, path):
        tokens = path.read_text().split()
        assert tokens[0] == "P2"
        w, h = int(tokens[1]), int(tokens[2])
        return np.array(tokens[4:], dtype=int).reshape(h, w)

    def test_scaling_and_orientation(self, tmp_path):
        g = self.grid([0.0, 1.0, 2.0, 3.0, 4.0, Undefined("zero mean")])
        pgm, legend = write_raster(g, tmp_path)
        img = self.read_pgm(pgm)
        # north (lat 40.5) is the top row
        assert img.tolist() == [[191, 255, 0], [1, 65, 128]]
        assert "min: 0.0" in legend.read_text() and "max: 4.0" in legend.read_text()

    def test_constant_grid(self, tmp_path):
        pgm, _ = write_raster(self.grid([2.5] * 6), tmp_path)
        assert set(self.read_pgm(pgm).ravel()) == {255}

    def test_irregular_skipped(self, tmp_path):
        g = MetricGrid("wp_cv", "annual", (("A", 0.0, 0.0, 1.0), ("B", 0.3, 1.0, 2.0), ("C", 1.0, 1.7, 3.0)))
        assert write_raster(g, tmp_path) == []

    def test_linear_levels(self, tmp_path):
        vals = [0.0, 0.25, 0.5, 0.75, 1.0, 0.1]
        img = self.read_pgm(write_raster(self.grid(vals), tmp_path)[0])
        flat = [img[1][0], img[1][1], img[1][2], img[0][0], img[0][1], img[0][2]]
        assert flat == [1 + round(254 * v) for v in vals]


@pytest.mark.slow
class TestDeterminism:
    def test_worker_counts_byte_identical(self, tmp_path):
        manifest = write_grid(tmp_path / "grid", 100, years=1, corrupt={"P013", "P077"})
        m = load_manifest(manifest)
        cfg = PipelineConfig(scales=(TimeScale.MONTHLY, TimeScale.SEASONAL, TimeScale.ANNUAL))
        outputs = {}
        for workers in (1, 8):
            out = tmp_path / f"out{workers}"
            write_outputs(run(m, cfg, workers), out, "csv+raster")
            outputs[workers] = {p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}
        assert outputs[1] == outputs[8]
        failures = read_rows(tmp_path / "out8" / "failures.csv")
        assert [r[0] for r in failures[1:]] == ["P013", "P077"]
        assert any(name.suffix == ".pgm" for name in outputs[1])
