"""TOML run configuration with strict key and range validation.

Every field has a calibrated default, so an empty file (or no file) is a
valid configuration.  Unknown keys are rejected rather than ignored: a typo
silently reverting a parameter to its default would be worse than an error.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .abc import PriorAxis, PriorGrid
from .model import CompartmentState, ModelParams, QuarantineLedger
from .peaks import MatchThresholds

__all__ = ["RunConfig", "load_config", "config_to_dict"]

_INIT_KEYS = (
    "s", "s_q", "e", "i_a", "i_s", "i_t", "q_i", "r_d", "r_u",
    "q_q_exposed", "q_q_infectious", "q_q_recovered",
)

_PARAM_KEYS = (
    "beta", "alpha", "mu", "gamma", "sigma", "tau_f", "tau_s", "tau_r",
    "r_i", "r_q", "n_cc", "i_out", "n_total", "break_return_day",
)

_ABC_KEYS = ("week_tolerance", "height_tolerance", "peak_floor", "n_trajectories")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    init: CompartmentState | None = None
    horizon: int = 112
    grid: PriorGrid = field(default_factory=PriorGrid)
    thresholds: MatchThresholds = field(default_factory=MatchThresholds)
    n_trajectories: int = 1000

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon_days must be >= 1")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")

    def initial_state(self) -> CompartmentState:
        """The configured initial state; default seeds 3 exposed students."""
        if self.init is not None:
            return self.init
        e = min(3, self.params.n_total)
        return CompartmentState(s=self.params.n_total - e, e=e)


def _reject_unknown(section: str, table: dict, allowed) -> None:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ValueError(
            f"unknown key(s) in [{section}]: {', '.join(unknown)}"
        )


def _build_init(table: dict, n_total: int) -> CompartmentState:
    _reject_unknown("init", table, _INIT_KEYS)
    counts = {}
    for key, value in table.items():
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"init.{key} must be a non-negative integer, got {value!r}")
        counts[key] = value
    ledger = QuarantineLedger(
        exposed=counts.pop("q_q_exposed", 0),
        infectious=counts.pop("q_q_infectious", 0),
        recovered=counts.pop("q_q_recovered", 0),
    )
    seeded = sum(counts.values()) - counts.get("s", 0) + ledger.total
    if "s" not in counts:
        if seeded > n_total:
            raise ValueError(f"init seeds {seeded} individuals but n_total = {n_total}")
        counts["s"] = n_total - seeded
    state = CompartmentState(q_q=ledger.total, q_q_ledger=ledger, **counts)
    state.validate_total(n_total)
    return state


def _build_axis(name: str, table: dict, default: PriorAxis) -> PriorAxis:
    _reject_unknown(f"grid.{name}", table, ("low", "high", "points"))
    return PriorAxis(
        low=float(table.get("low", default.low)),
        high=float(table.get("high", default.high)),
        points=int(table.get("points", default.points)),
    )


def load_config(path: str | None = None) -> RunConfig:
    """Parse a TOML config file; every omitted field keeps its default."""
    if path is None:
        return RunConfig()
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    _reject_unknown("top level", raw, ("params", "init", "run", "grid", "abc"))

    params_table = raw.get("params", {})
    _reject_unknown("params", params_table, _PARAM_KEYS)
    params = ModelParams(**params_table)

    run_table = raw.get("run", {})
    _reject_unknown("run", run_table, ("horizon_days",))
    horizon = int(run_table.get("horizon_days", 112))

    grid_table = raw.get("grid", {})
    _reject_unknown("grid", grid_table, ("alpha", "beta", "i_out", "points"))
    default = PriorGrid()
    shared_points = grid_table.get("points")
    def axis(name, dflt):
        table = dict(grid_table.get(name, {}))
        if shared_points is not None and "points" not in table:
            table["points"] = shared_points
        return _build_axis(name, table, dflt)
    grid = PriorGrid(
        alpha=axis("alpha", default.alpha),
        beta=axis("beta", default.beta),
        i_out=axis("i_out", default.i_out),
    )

    abc_table = raw.get("abc", {})
    _reject_unknown("abc", abc_table, _ABC_KEYS)
    thresholds = MatchThresholds(
        week_tolerance=int(abc_table.get("week_tolerance", 1)),
        height_tolerance=int(abc_table.get("height_tolerance", 10)),
        peak_floor=int(abc_table.get("peak_floor", 20)),
    )
    n_trajectories = int(abc_table.get("n_trajectories", 1000))

    init = None
    if "init" in raw:
        init = _build_init(raw["init"], params.n_total)

    return RunConfig(
        params=params,
        init=init,
        horizon=horizon,
        grid=grid,
        thresholds=thresholds,
        n_trajectories=n_trajectories,
    )


def config_to_dict(config: RunConfig) -> dict:
    """Flatten a RunConfig into plain JSON-serializable types (for manifests)."""
    init = config.initial_state()
    led = init.q_q_ledger
    return {
        "params": {key: getattr(config.params, key) for key in _PARAM_KEYS},
        "init": {
            **{key: getattr(init, key) for key in
               ("s", "s_q", "e", "i_a", "i_s", "i_t", "q_i", "r_d", "r_u")},
            "q_q_exposed": led.exposed,
            "q_q_infectious": led.infectious,
            "q_q_recovered": led.recovered,
        },
        "run": {"horizon_days": config.horizon},
        "grid": {
            name: {"low": axis.low, "high": axis.high, "points": axis.points}
            for name, axis in (
                ("alpha", config.grid.alpha),
                ("beta", config.grid.beta),
                ("i_out", config.grid.i_out),
            )
        },
        "abc": {
            "week_tolerance": config.thresholds.week_tolerance,
            "height_tolerance": config.thresholds.height_tolerance,
            "peak_floor": config.thresholds.peak_floor,
            "n_trajectories": config.n_trajectories,
        },
    }
