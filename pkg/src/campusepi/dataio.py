"""CSV/JSON serialization for every artifact the toolkit produces.

All writers have a matching reader and round-trip exactly: integers stay
integers and floats are written with shortest-repr formatting.  Output
directories also receive a manifest (config echo, seed, package version)
sufficient to re-run the command bit-identically; manifests carry no
timestamps so re-runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from .abc import AcceptanceSurface, CredibleIntervals, PosteriorSample
from .engine import FLOW_NAMES
from .ensemble import CurveMatrix, FunctionalBand
from .model import Trajectory
from .policy import PolicyReport

__all__ = [
    "ObservedSeries",
    "parse_observed_csv",
    "write_weekly_csv",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_posterior_csv",
    "read_posterior_csv",
    "write_surface_csv",
    "read_surface_csv",
    "write_intervals_json",
    "read_intervals_json",
    "write_band_csv",
    "read_band_csv",
    "write_curves_csv",
    "read_curves_csv",
    "write_policy_report_json",
    "write_manifest",
]

# Column headers follow the model notation: compartments then daily flows.
_STATE_HEADERS = ("S", "S_q", "E", "I_A", "I_S", "I_T", "Q_i", "Q_q", "R_D", "R_U")
_FLOW_HEADERS = (
    "n_SE", "n_SSq", "n_SqS", "n_EIa", "n_EIs", "n_EQq", "n_IaIt", "n_IaQq",
    "n_IaRu", "n_IsIt", "n_IsRu", "n_ItQi", "n_QiRd", "n_QqIt", "n_QqRu", "n_RuQq",
)


@dataclass(frozen=True)
class ObservedSeries:
    """Validated weekly observed case counts, weeks contiguous from 1."""

    weeks: tuple[int, ...]
    cases: tuple[int, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array(self.cases, dtype=np.int64)


class ParseError(ValueError):
    pass


def parse_observed_csv(path) -> ObservedSeries:
    """Read a week,cases CSV; reject gaps, negatives and non-integers."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError(f"{path}: file is empty")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != ["week", "cases"]:
        raise ParseError(f"{path}: expected header 'week,cases', got {rows[0]!r}")
    if len(rows) == 1:
        raise ParseError(f"{path}: no data rows")
    weeks, cases = [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"{path}:{line_no}: expected 2 columns, got {len(row)}")
        try:
            week = int(row[0])
            count = int(row[1])
        except ValueError:
            raise ParseError(f"{path}:{line_no}: non-integer value in {row!r}") from None
        expected = len(weeks) + 1
        if week != expected:
            raise ParseError(
                f"{path}:{line_no}: weeks must be contiguous from 1; expected week {expected}, got {week}"
            )
        if count < 0:
            raise ParseError(f"{path}:{line_no}: negative case count {count}")
        weeks.append(week)
        cases.append(count)
    return ObservedSeries(weeks=tuple(weeks), cases=tuple(cases))


def write_weekly_csv(series, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week", "cases"])
        for week, value in enumerate(np.asarray(series), start=1):
            writer.writerow([week, int(value)])


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    """One row per day; flows on row t are the transitions from day t-1 to t."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("day",) + _STATE_HEADERS + _FLOW_HEADERS)
        for day in range(trajectory.horizon + 1):
            state = [int(v) for v in trajectory.states[day, :10]]
            if day == 0:
                flows = [0] * len(FLOW_NAMES)
            else:
                flows = [int(v) for v in trajectory.flows[day - 1]]
            writer.writerow([day] + state + flows)


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_trajectory_csv`: (states, flows) arrays."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    if header != ("day",) + _STATE_HEADERS + _FLOW_HEADERS:
        raise ParseError(f"{path}: unexpected trajectory header")
    data = np.array([[int(v) for v in row] for row in rows[1:]], dtype=np.int64)
    states = data[:, 1:11]
    flows = data[1:, 11:]
    return states, flows


def write_posterior_csv(posterior: PosteriorSample, path) -> None:
    """One row per accepted draw."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "i_out"])
        for a, b, i in posterior.draws:
            writer.writerow([repr(float(a)), repr(float(b)), int(i)])


def read_posterior_csv(path) -> PosteriorSample:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["alpha", "beta", "i_out"]:
        raise ParseError(f"{path}: expected header alpha,beta,i_out")
    draws = np.array(
        [[float(a), float(b), float(i)] for a, b, i in rows[1:]], dtype=float
    ).reshape(-1, 3)
    if draws.shape[0] == 0:
        raise ParseError(f"{path}: posterior file has no draws")
    return PosteriorSample.from_draws(draws)


def write_surface_csv(surface: AcceptanceSurface, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "i_out", "accepted", "attempted"])
        for (a, b, i), acc, att in zip(surface.grid, surface.accepted, surface.attempted):
            writer.writerow([repr(float(a)), repr(float(b)), int(i), int(acc), int(att)])


def read_surface_csv(path) -> AcceptanceSurface:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["alpha", "beta", "i_out", "accepted", "attempted"]:
        raise ParseError(f"{path}: unexpected surface header")
    data = rows[1:]
    grid = np.array([[float(a), float(b), float(i)] for a, b, i, _, _ in data])
    accepted = np.array([int(acc) for _, _, _, acc, _ in data], dtype=np.int64)
    attempted = np.array([int(att) for _, _, _, _, att in data], dtype=np.int64)
    return AcceptanceSurface(grid=grid, accepted=accepted, attempted=attempted)


def write_intervals_json(intervals: CredibleIntervals, path, extra: dict | None = None) -> None:
    payload = intervals.as_dict()
    if extra:
        payload.update(extra)
    _write_json(payload, path)


def read_intervals_json(path) -> CredibleIntervals:
    with Path(path).open() as fh:
        payload = json.load(fh)
    return CredibleIntervals(
        alpha=tuple(payload["alpha"]),
        beta=tuple(payload["beta"]),
        i_out=tuple(payload["i_out"]),
        level=payload["level"],
    )


def write_band_csv(band: FunctionalBand, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week", "fence_lo", "band_lo", "median", "band_hi", "fence_hi"])
        for w in range(band.median.shape[0]):
            writer.writerow([
                w + 1,
                repr(float(band.fence_low[w])),
                repr(float(band.band_low[w])),
                repr(float(band.median[w])),
                repr(float(band.band_high[w])),
                repr(float(band.fence_high[w])),
            ])


def read_band_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


def write_curves_csv(matrix: CurveMatrix, path) -> None:
    """Long format: one row per (curve, week)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve", "week", "cases"])
        for c in range(matrix.curves.shape[0]):
            for w in range(matrix.curves.shape[1]):
                writer.writerow([c, w + 1, int(matrix.curves[c, w])])


def read_curves_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["curve", "week", "cases"]:
        raise ParseError(f"{path}: unexpected curves header")
    data = np.array([[int(v) for v in row] for row in rows[1:]], dtype=np.int64)
    n_curves = data[:, 0].max() + 1
    n_weeks = data[:, 1].max()
    curves = np.zeros((n_curves, n_weeks), dtype=np.int64)
    curves[data[:, 0], data[:, 1] - 1] = data[:, 2]
    return curves


def policy_report_payload(reports: list[PolicyReport]) -> dict:
    return {"strategies": [r.as_dict() for r in reports]}


def write_policy_report_json(reports: list[PolicyReport], path) -> None:
    _write_json(policy_report_payload(reports), path)


def package_version() -> str:
    try:
        return metadata.version("campusepi")
    except metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(outdir, command: str, seed: int, config_dict: dict) -> None:
    """Provenance record: enough to re-run the command bit-identically."""
    payload = {
        "command": command,
        "seed": seed,
        "config": config_dict,
        "version": package_version(),
    }
    _write_json(payload, Path(outdir) / "manifest.json")


def _write_json(payload: dict, path) -> None:
    with Path(path).open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
