"""Hourly resource series: time axis, calendar periods, unit handling and aggregation.

Seasons are meteorological (DJF, MAM, JJA, SON). December belongs to the DJF
season of the following year, so ``1979-12-15`` falls in ``1980-DJF``.
Incomplete calendar periods at either end of an axis are dropped from
aggregates and reported, never padded.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from ._validation import as_1d_float

HOUR = np.timedelta64(1, "h")
SECONDS_PER_HOUR = 3600.0
SEASONS = ("DJF", "MAM", "JJA", "SON")
COLUMNS = ("u100", "ssrd", "t2m", "u10")
SSRD_UNITS = ("J_per_m2", "W_per_m2")
T2M_UNITS = ("C", "K")


class SeriesLoadError(ValueError):
    """Raised when a resource series cannot be ingested."""


class InsufficientSpanError(ValueError):
    """Raised when an axis does not cover a single complete period at the requested scale."""


class TimeScale(str, Enum):
    HOURLY = "hourly"
    DAILY = "daily"
    MONTHLY = "monthly"
    SEASONAL = "seasonal"
    ANNUAL = "annual"

    @classmethod
    def parse(cls, value: "str | TimeScale") -> "TimeScale":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown time scale {value!r} (expected one of {names})") from None


def _to_hour(value) -> np.datetime64:
    if isinstance(value, _dt.datetime):
        if value.tzinfo is not None:
            value = value.astimezone(_dt.timezone.utc).replace(tzinfo=None)
        value = value.isoformat()
    if isinstance(value, str):
        value = _strip_utc(value)
    stamp = np.datetime64(value, "s")
    if stamp.astype(np.int64) % 3600:
        raise ValueError(f"timestamp {value} is not on a whole hour")
    return stamp.astype("datetime64[h]")


def _strip_utc(text: str) -> str:
    text = text.strip().replace(" ", "T")
    for suffix in ("Z", "z", "+00:00", "+0000"):
        if text.endswith(suffix):
            return text[: -len(suffix)]
    if len(text) > 19 and text[19] in "+-":
        raise ValueError(f"timestamp {text} is not UTC")
    return text


@dataclass(frozen=True)
class TimeAxis:
    """Gap-free hourly UTC axis starting at ``start`` with ``length`` steps."""

    start: np.datetime64
    length: int

    def __post_init__(self):
        object.__setattr__(self, "start", _to_hour(self.start))
        if int(self.length) < 1:
            raise ValueError("time axis needs at least one hour")
        object.__setattr__(self, "length", int(self.length))

    @classmethod
    def from_timestamps(cls, stamps) -> "TimeAxis":
        """Build an axis from explicit timestamps, rejecting gaps, duplicates and partial hours."""
        stamps = np.asarray(stamps)
        if stamps.size == 0:
            raise ValueError("no timestamps")
        if not np.issubdtype(stamps.dtype, np.datetime64):
            stamps = np.array([_strip_utc(str(s)) for s in stamps], dtype="datetime64[s]")
        secs = stamps.astype("datetime64[s]").astype(np.int64)
        off = np.flatnonzero(secs % 3600)
        if off.size:
            raise ValueError(f"timestamp at index {off[0]} is not on a whole hour")
        steps = np.diff(secs)
        bad = np.flatnonzero(steps != 3600)
        if bad.size:
            i = int(bad[0])
            raise ValueError(
                f"axis is not strictly hourly between index {i} and {i + 1} "
                f"({stamps[i]} -> {stamps[i + 1]})")
        return cls(stamps[0], stamps.size)

    @classmethod
    def span(cls, first, last_exclusive) -> "TimeAxis":
        """Axis covering ``[first, last_exclusive)``."""
        first, last = _to_hour(first), _to_hour(last_exclusive)
        return cls(first, int((last - first) / HOUR))

    @property
    def step(self) -> np.timedelta64:
        return HOUR

    @property
    def end(self) -> np.datetime64:
        """First hour after the axis."""
        return self.start + self.length * HOUR

    @cached_property
    def times(self) -> np.ndarray:
        t = self.start + np.arange(self.length) * HOUR
        t.flags.writeable = False
        return t

    def __len__(self) -> int:
        return self.length


class Period(NamedTuple):
    label: str
    start: int
    stop: int
    expected_hours: int

    @property
    def hours(self) -> int:
        return self.stop - self.start

    @property
    def complete(self) -> bool:
        return self.hours == self.expected_hours

    @property
    def indices(self) -> range:
        return range(self.start, self.stop)


def _season_code(months: np.ndarray) -> np.ndarray:
    # months counted from 1970-01; code k spans months 3k-1 .. 3k+1
    return (months + 1) // 3


def _period_keys(times: np.ndarray, scale: TimeScale) -> np.ndarray:
    if scale is TimeScale.DAILY:
        return times.astype("datetime64[D]").astype(np.int64)
    if scale is TimeScale.MONTHLY:
        return times.astype("datetime64[M]").astype(np.int64)
    if scale is TimeScale.SEASONAL:
        return _season_code(times.astype("datetime64[M]").astype(np.int64))
    if scale is TimeScale.ANNUAL:
        return times.astype("datetime64[Y]").astype(np.int64)
    raise ValueError(f"no calendar periods at {scale.value} scale")


def _period_bounds(key: int, scale: TimeScale) -> tuple[np.datetime64, np.datetime64, str]:
    if scale is TimeScale.DAILY:
        d = np.datetime64(key, "D")
        return d.astype("datetime64[h]"), (d + 1).astype("datetime64[h]"), str(d)
    if scale is TimeScale.MONTHLY:
        m = np.datetime64(key, "M")
        return m.astype("datetime64[h]"), (m + 1).astype("datetime64[h]"), str(m)
    if scale is TimeScale.SEASONAL:
        first = np.datetime64(3 * key - 1, "M")
        mid = 3 * key
        label = f"{1970 + mid // 12}-{SEASONS[(mid % 12) // 3]}"
        return first.astype("datetime64[h]"), (first + 3).astype("datetime64[h]"), label
    y = np.datetime64(key, "Y")
    return y.astype("datetime64[h]"), (y + 1).astype("datetime64[h]"), str(y)


def period_table(axis: TimeAxis, scale: "TimeScale | str") -> list[Period]:
    """Calendar periods touched by ``axis``, in time order, with completeness info."""
    scale = TimeScale.parse(scale)
    keys = _period_keys(axis.times, scale)
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    stops = np.r_[starts[1:], axis.length]
    periods = []
    for s, e in zip(starts.tolist(), stops.tolist()):
        lo, hi, label = _period_bounds(int(keys[s]), scale)
        periods.append(Period(label, s, e, int((hi - lo) / HOUR)))
    return periods


def season_partition(axis: TimeAxis) -> dict[str, Period]:
    """Map ``YYYY-SSS`` season labels to the hour index range each covers.

    Every hour lands in exactly one bucket; partial seasons at the ends of the
    axis are included with ``complete == False``.
    """
    return {p.label: p for p in period_table(axis, TimeScale.SEASONAL)}


@dataclass(frozen=True)
class AggregatedSeries:
    scale: TimeScale
    labels: tuple[str, ...]
    values: np.ndarray
    hours: np.ndarray
    dropped: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.labels)

    def season(self, name: str) -> "AggregatedSeries":
        """Restrict a seasonal aggregate to one season name (``"DJF"``...)."""
        if self.scale is not TimeScale.SEASONAL:
            raise ValueError("season() needs a seasonal aggregate")
        if name not in SEASONS:
            raise ValueError(f"unknown season {name!r}")
        keep = [i for i, lab in enumerate(self.labels) if lab.endswith(name)]
        return AggregatedSeries(self.scale, tuple(self.labels[i] for i in keep),
                                self.values[keep], self.hours[keep],
                                tuple(d for d in self.dropped if d.endswith(name)))


def aggregate(values, axis: TimeAxis, scale: "TimeScale | str") -> AggregatedSeries:
    """Mean of ``values`` over each complete calendar period of ``axis``."""
    scale = TimeScale.parse(scale)
    if scale is TimeScale.HOURLY:
        raise ValueError("aggregate() needs a scale coarser than hourly")
    values = as_1d_float(values)
    if values.size != axis.length:
        raise ValueError(f"series has {values.size} values but axis has {axis.length} hours")
    periods = period_table(axis, scale)
    complete = [p for p in periods if p.complete]
    dropped = tuple(p.label for p in periods if not p.complete)
    if not complete:
        raise InsufficientSpanError(
            f"insufficient span: {axis.length} h contain no complete {scale.value} period")
    means = np.array([values[p.start:p.stop].mean() for p in complete])
    hours = np.array([p.hours for p in complete], dtype=np.int64)
    return AggregatedSeries(scale, tuple(p.label for p in complete), means, hours, dropped)


def complete_years(axis: TimeAxis) -> list[Period]:
    return [p for p in period_table(axis, TimeScale.ANNUAL) if p.complete]


def normalize_irradiance(raw) -> np.ndarray:
    """Convert hourly accumulated irradiation (J/m^2) to mean irradiance (W/m^2).

    The accumulation is attributed to the stamped hour.
    """
    raw = np.asarray(raw, dtype=float)
    neg = np.flatnonzero(raw < 0)
    if neg.size:
        raise SeriesLoadError(
            f"negative accumulated irradiance at row index {int(neg[0])}: {raw[neg[0]]!r}")
    return raw / SECONDS_PER_HOUR


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ResourceSeries:
    """Aligned hourly columns for one grid point.

    ``ssrd`` is always stored in W/m^2 and ``t2m`` in degrees Celsius; use
    :meth:`from_raw` to convert from ERA5-native units.
    """

    axis: TimeAxis
    u100: np.ndarray
    ssrd: np.ndarray
    t2m: np.ndarray
    u10: np.ndarray
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for name in COLUMNS:
            col = np.asarray(getattr(self, name), dtype=float)
            if col.ndim != 1 or col.size != self.axis.length:
                raise SeriesLoadError(
                    f"column {name} has length {col.size}, axis has {self.axis.length}")
            bad = np.flatnonzero(~np.isfinite(col))
            if bad.size:
                raise SeriesLoadError(f"missing value in column {name} at row index {int(bad[0])}")
            if name != "t2m":
                neg = np.flatnonzero(col < 0)
                if neg.size:
                    raise SeriesLoadError(
                        f"negative value in column {name} at row index {int(neg[0])}")
            object.__setattr__(self, name, _readonly(col))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @classmethod
    def from_raw(cls, axis: TimeAxis, u100, ssrd, t2m, u10, *,
                 ssrd_units: str = "W_per_m2", t2m_units: str = "C") -> "ResourceSeries":
        if ssrd_units not in SSRD_UNITS:
            raise SeriesLoadError(f"ssrd_units must be one of {SSRD_UNITS}, got {ssrd_units!r}")
        if t2m_units not in T2M_UNITS:
            raise SeriesLoadError(f"t2m_units must be one of {T2M_UNITS}, got {t2m_units!r}")
        converted = ssrd_units == "J_per_m2"
        ssrd = normalize_irradiance(ssrd) if converted else np.asarray(ssrd, dtype=float)
        t2m = np.asarray(t2m, dtype=float)
        if t2m_units == "K":
            t2m = t2m - 273.15
        meta = {"ssrd_converted_from_J_per_m2": converted, "t2m_converted_from_K": t2m_units == "K"}
        return cls(axis, u100, ssrd, t2m, u10, meta)

    def __len__(self) -> int:
        return self.axis.length


def _read_header_block(lines) -> dict[str, str]:
    meta = {}
    for line in lines:
        body = line.lstrip("#").strip()
        if ":" in body:
            key, _, val = body.partition(":")
            meta[key.strip()] = val.strip()
    return meta


def read_series_csv(path, *, ssrd_units: str | None = None,
                    t2m_units: str | None = None) -> ResourceSeries:
    """Load a per-point CSV (``timestamp,u100,ssrd,t2m,u10``).

    Unit declarations come from ``# ssrd_units: ...`` / ``# t2m_units: ...``
    lines at the top of the file or from the keyword arguments (typically the
    manifest). A declaration is required for ``ssrd``; conflicting
    declarations are an error.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SeriesLoadError(f"{path}: {exc.strerror or exc}") from None
    lines = text.splitlines()
    n_comment = 0
    while n_comment < len(lines) and lines[n_comment].startswith("#"):
        n_comment += 1
    header_meta = _read_header_block(lines[:n_comment])

    def resolve(key, given, default):
        in_file = header_meta.get(key)
        if in_file and given and in_file != given:
            raise SeriesLoadError(f"{path}: {key} declared as {in_file!r} in file but {given!r} elsewhere")
        value = in_file or given or default
        if value is None:
            raise SeriesLoadError(f"{path}: {key} not declared (add '# {key}: ...' or a manifest entry)")
        return value

    s_units = resolve("ssrd_units", ssrd_units, None)
    t_units = resolve("t2m_units", t2m_units, "C")

    reader = csv.reader(lines[n_comment:])
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SeriesLoadError(f"{path}: empty file") from None
    if header != ["timestamp", *COLUMNS]:
        raise SeriesLoadError(f"{path}: expected header timestamp,{','.join(COLUMNS)}, got {','.join(header)}")
    stamps, rows = [], []
    first_line = n_comment + 2
    for offset, row in enumerate(reader):
        lineno = first_line + offset
        if not row:
            continue
        if len(row) != 5 or any(not cell.strip() for cell in row):
            raise SeriesLoadError(f"{path}: line {lineno}: missing value")
        try:
            rows.append([float(c) for c in row[1:]])
            stamps.append(_strip_utc(row[0]))
        except ValueError as exc:
            raise SeriesLoadError(f"{path}: line {lineno}: {exc}") from None
    if not rows:
        raise SeriesLoadError(f"{path}: no data rows")
    try:
        times = np.array(stamps, dtype="datetime64[s]")
        axis = TimeAxis.from_timestamps(times)
    except ValueError as exc:
        raise SeriesLoadError(f"{path}: {exc}") from None
    data = np.array(rows)
    try:
        return ResourceSeries.from_raw(axis, data[:, 0], data[:, 1], data[:, 2], data[:, 3],
                                       ssrd_units=s_units, t2m_units=t_units)
    except SeriesLoadError as exc:
        raise SeriesLoadError(f"{path}: {exc}") from None


def write_series_csv(path, series: ResourceSeries) -> None:
    """Write ``series`` in the per-point CSV format (irradiance in W/m^2, temperature in C)."""
    with open(path, "w", newline="") as fh:
        fh.write("# ssrd_units: W_per_m2\n# t2m_units: C\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", *COLUMNS])
        for i, t in enumerate(series.axis.times):
            w.writerow([f"{t}:00:00Z", *(repr(float(getattr(series, c)[i])) for c in COLUMNS)])
