"""Weekly case series and the peak statistics used for fitting.

A "case" is a returned positive result, i.e. the daily i_t -> q_i flow; weeks
are consecutive 7-day blocks with a trailing partial week kept.  A peak is a
week strictly higher than both neighbours with at least ``peak_floor`` cases;
the first and last weeks can never qualify.  Two peak sets match when they
have the same number of peaks and each pair (in order) agrees within the week
and height tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Trajectory

__all__ = [
    "MatchThresholds",
    "PeakSet",
    "weekly_cases",
    "weekly_series_from_daily",
    "detect_peaks",
    "abc_match",
]


@dataclass(frozen=True)
class MatchThresholds:
    """Acceptance tolerances: +/- weeks, +/- cases, and the peak floor."""

    week_tolerance: int = 1
    height_tolerance: int = 10
    peak_floor: int = 20

    def __post_init__(self):
        if self.week_tolerance < 0 or self.height_tolerance < 0:
            raise ValueError("tolerances must be >= 0")
        if self.peak_floor < 0:
            raise ValueError("peak_floor must be >= 0")


@dataclass(frozen=True)
class PeakSet:
    """Week indices (1-based, strictly increasing) and heights of peaks."""

    weeks: tuple[int, ...] = ()
    heights: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.weeks) != len(self.heights):
            raise ValueError("weeks and heights must have equal length")
        if any(b <= a for a, b in zip(self.weeks, self.weeks[1:])):
            raise ValueError("week indices must be strictly increasing")

    @property
    def count(self) -> int:
        return len(self.weeks)

    def as_records(self) -> list[dict]:
        return [
            {"week": int(w), "height": int(h)}
            for w, h in zip(self.weeks, self.heights)
        ]


def weekly_series_from_daily(daily: np.ndarray) -> np.ndarray:
    """Sum a per-day count vector into weeks of 7 days (last week may be short)."""
    daily = np.asarray(daily)
    n_days = daily.shape[-1]
    n_weeks = -(-n_days // 7)
    padded = np.zeros(daily.shape[:-1] + (n_weeks * 7,), dtype=daily.dtype)
    padded[..., :n_days] = daily
    return padded.reshape(daily.shape[:-1] + (n_weeks, 7)).sum(axis=-1)


def weekly_cases(trajectory: Trajectory) -> np.ndarray:
    """Weekly counts of returned positive results for one trajectory."""
    return weekly_series_from_daily(trajectory.daily_cases)


def detect_peaks(series, peak_floor: int = 20) -> PeakSet:
    """Find the peaks of a weekly series.

    Week t (1-based) is a peak iff series[t-1] < series[t] > series[t+1] and
    series[t] >= peak_floor.  Ties (plateaus) are not peaks.
    """
    series = np.asarray(series)
    if series.size == 0:
        raise ValueError("series must be non-empty")
    if series.size < 3:
        return PeakSet()
    mid = series[1:-1]
    is_peak = (mid > series[:-2]) & (mid > series[2:]) & (mid >= peak_floor)
    idx = np.nonzero(is_peak)[0]
    return PeakSet(
        weeks=tuple(int(i) + 2 for i in idx),
        heights=tuple(int(series[i + 1]) for i in idx),
    )


def abc_match(
    observed: PeakSet,
    simulated: PeakSet,
    thresholds: MatchThresholds = MatchThresholds(),
) -> bool:
    """True when the two peak sets agree within the tolerances."""
    if observed.count != simulated.count:
        return False
    for ow, oh, sw, sh in zip(
        observed.weeks, observed.heights, simulated.weeks, simulated.heights
    ):
        if abs(ow - sw) > thresholds.week_tolerance:
            return False
        if abs(oh - sh) > thresholds.height_tolerance:
            return False
    return True
