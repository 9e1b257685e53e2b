"""Threshold events, complementarity/synergy indices and below-threshold persistence.

An hour is *available* for a resource when its value is strictly above the
threshold; an hour exactly at the threshold is unavailable. Runs of
unavailable hours are taken over the whole series, across month and year
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import as_1d_float

WP_L_DEFAULT = 280.0
SP_L_DEFAULT = 125.0


@dataclass(frozen=True)
class Thresholds:
    wp_l: float = WP_L_DEFAULT
    sp_l: float = SP_L_DEFAULT

    def __post_init__(self):
        if self.wp_l < 0 or self.sp_l < 0:
            raise ValueError("thresholds must be non-negative")


@dataclass(frozen=True)
class EventFlags:
    e_w: np.ndarray
    e_s: np.ndarray

    def __post_init__(self):
        e_w = np.asarray(self.e_w, dtype=bool)
        e_s = np.asarray(self.e_s, dtype=bool)
        if e_w.ndim != 1 or e_w.shape != e_s.shape:
            raise ValueError("event flags must be aligned 1-d arrays")
        object.__setattr__(self, "e_w", e_w)
        object.__setattr__(self, "e_s", e_s)

    def __len__(self):
        return self.e_w.size


def classify_events(wp, sp, th: Thresholds | None = None) -> EventFlags:
    th = th or Thresholds()
    wp = as_1d_float(wp, "wp")
    sp = as_1d_float(sp, "sp")
    if wp.shape != sp.shape:
        raise ValueError("wp and sp must be aligned")
    return EventFlags(wp > th.wp_l, sp > th.sp_l)


@dataclass(frozen=True)
class ComplementarityIndices:
    """Hour counts of the four wind/solar availability cells and their relative frequencies."""

    n_hours: int
    n_wind_only: int
    n_solar_only: int
    n_neither: int
    n_both: int

    def _p(self, count: int) -> float:
        return count / self.n_hours

    @property
    def wcs(self) -> float:
        return self._p(self.n_wind_only)

    @property
    def scw(self) -> float:
        return self._p(self.n_solar_only)

    @property
    def uws(self) -> float:
        return self._p(self.n_neither)

    @property
    def both_available(self) -> float:
        return self._p(self.n_both)

    @property
    def n_exactly_one(self) -> int:
        return self.n_wind_only + self.n_solar_only

    @property
    def sws(self) -> float:
        return self._p(self.n_exactly_one)

    def exact(self) -> dict[str, Fraction]:
        """The indices as exact fractions of the hour count."""
        n = self.n_hours
        return {"wcs": Fraction(self.n_wind_only, n), "scw": Fraction(self.n_solar_only, n),
                "uws": Fraction(self.n_neither, n), "sws": Fraction(self.n_exactly_one, n),
                "both_available": Fraction(self.n_both, n)}


def indices(flags: EventFlags) -> ComplementarityIndices:
    n = len(flags)
    if n == 0:
        raise ValueError("no hours")
    w, s = flags.e_w, flags.e_s
    return ComplementarityIndices(
        n_hours=n,
        n_wind_only=int(np.count_nonzero(w & ~s)),
        n_solar_only=int(np.count_nonzero(~w & s)),
        n_neither=int(np.count_nonzero(~w & ~s)),
        n_both=int(np.count_nonzero(w & s)),
    )


def eligibility(wp, sp, th: Thresholds | None = None) -> tuple[bool, bool]:
    """Whether the long-term mean of each resource exceeds its threshold."""
    th = th or Thresholds()
    return (bool(as_1d_float(wp, "wp").mean() > th.wp_l),
            bool(as_1d_float(sp, "sp").mean() > th.sp_l))


def run_lengths(mask) -> np.ndarray:
    """Lengths of maximal runs of ``True`` in ``mask``, in order of occurrence."""
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 1:
        raise ValueError("mask must be 1-d")
    edges = np.diff(np.r_[0, m.view(np.int8), 0])
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return stops - starts


@dataclass(frozen=True)
class DurationStats:
    """Run statistics for one stream of below-threshold hours; mean/max are ``None`` without runs."""

    n_runs: int
    total_hours: int
    mean: float | None
    max: int | None

    @classmethod
    def from_mask(cls, mask) -> "DurationStats":
        runs = run_lengths(mask)
        if runs.size == 0:
            return cls(0, 0, None, None)
        return cls(int(runs.size), int(runs.sum()), float(runs.mean()), int(runs.max()))


@dataclass(frozen=True)
class Durations:
    """Below-threshold persistence; ``None`` where the site is not eligible for that resource."""

    wind: DurationStats | None
    solar: DurationStats | None
    joint: DurationStats | None


def durations(flags: EventFlags, eligible_wind: bool, eligible_solar: bool) -> Durations:
    off_w, off_s = ~flags.e_w, ~flags.e_s
    return Durations(
        DurationStats.from_mask(off_w) if eligible_wind else None,
        DurationStats.from_mask(off_s) if eligible_solar else None,
        DurationStats.from_mask(off_w & off_s) if eligible_wind and eligible_solar else None,
    )


@dataclass(frozen=True)
class EventReport:
    indices: ComplementarityIndices
    eligible_wind: bool
    eligible_solar: bool
    durations: Durations
    thresholds: Thresholds

    @property
    def wcs(self):
        return self.indices.wcs

    @property
    def scw(self):
        return self.indices.scw

    @property
    def uws(self):
        return self.indices.uws

    @property
    def sws(self):
        return self.indices.sws

    @property
    def both_available(self):
        return self.indices.both_available


def event_report(wp, sp, th: Thresholds | None = None) -> EventReport:
    th = th or Thresholds()
    flags = classify_events(wp, sp, th)
    ew, es = eligibility(wp, sp, th)
    return EventReport(indices(flags), ew, es, durations(flags, ew, es), th)
