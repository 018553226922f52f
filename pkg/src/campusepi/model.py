"""Domain types and single-trajectory API for the campus epidemic model.

The heavy lifting happens in :mod:`campusepi.engine`; this module provides the
validated parameter/state/flow types, deterministic RNG streams, and the
scalar operations (one day step, full simulation, break injection) that the
rest of the package builds on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .engine import COMPARTMENTS, FLOW_NAMES, STATE_COLUMNS

__all__ = [
    "ModelParams",
    "QuarantineLedger",
    "CompartmentState",
    "DailyFlows",
    "Trajectory",
    "trajectory_rng",
    "binomial_draw",
    "partition_departures",
    "force_of_infection",
    "step",
    "apply_break_injection",
    "simulate",
]

_RATE_FIELDS = ("beta", "mu", "gamma", "tau_f", "tau_s", "tau_r", "r_i", "r_q")
_PROPORTION_FIELDS = ("alpha", "sigma")


@dataclass(frozen=True)
class ModelParams:
    """Per-day transition rates, proportions and population constants.

    Defaults are the calibrated campus values: 3-day latency, 14-day
    undetected infectious period, 40% of students tested every 14 days,
    2-day symptomatic-testing and result-return delays, 10-day isolation,
    14-day quarantine, and 10 close contacts per isolation.
    """

    beta: float = 0.4
    alpha: float = 0.3
    mu: float = 1.0 / 3.0
    gamma: float = 1.0 / 14.0
    sigma: float = 0.4
    tau_f: float = 1.0 / 14.0
    tau_s: float = 1.0 / 2.0
    tau_r: float = 1.0 / 2.0
    r_i: float = 1.0 / 10.0
    r_q: float = 1.0 / 14.0
    n_cc: int = 10
    i_out: int = 100
    n_total: int = 6500
    break_return_day: int = 77

    def __post_init__(self):
        for name in _RATE_FIELDS + _PROPORTION_FIELDS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value!r}")
        if not (isinstance(self.n_cc, int) and self.n_cc >= 0):
            raise ValueError(f"n_cc must be a non-negative integer, got {self.n_cc!r}")
        if not (isinstance(self.n_total, int) and self.n_total > 0):
            raise ValueError(f"n_total must be a positive integer, got {self.n_total!r}")
        if not (isinstance(self.i_out, int) and 0 <= self.i_out <= self.n_total):
            raise ValueError(f"i_out must be an integer in [0, n_total], got {self.i_out!r}")
        if not (isinstance(self.break_return_day, int) and self.break_return_day >= 0):
            raise ValueError(f"break_return_day must be a non-negative integer, got {self.break_return_day!r}")

    def with_values(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class QuarantineLedger:
    """Internal status of the q_q compartment occupants."""

    exposed: int = 0
    infectious: int = 0
    recovered: int = 0

    def __post_init__(self):
        for name in ("exposed", "infectious", "recovered"):
            if getattr(self, name) < 0:
                raise ValueError(f"ledger {name} count must be >= 0")

    @property
    def total(self) -> int:
        return self.exposed + self.infectious + self.recovered


@dataclass(frozen=True)
class CompartmentState:
    """Integer occupancy of the ten compartments plus the q_q ledger.

    Counts must be non-negative and the ledger must sum to q_q; use
    :meth:`validate_total` to additionally check conservation against a
    population size.
    """

    s: int = 0
    s_q: int = 0
    e: int = 0
    i_a: int = 0
    i_s: int = 0
    i_t: int = 0
    q_i: int = 0
    q_q: int = 0
    r_d: int = 0
    r_u: int = 0
    q_q_ledger: QuarantineLedger = field(default_factory=QuarantineLedger)

    def __post_init__(self):
        for name in COMPARTMENTS:
            if getattr(self, name) < 0:
                raise ValueError(f"compartment {name} must be >= 0")
        if self.q_q_ledger.total != self.q_q:
            raise ValueError(
                f"q_q ledger sums to {self.q_q_ledger.total} but q_q = {self.q_q}"
            )

    @property
    def total(self) -> int:
        return sum(getattr(self, name) for name in COMPARTMENTS)

    def validate_total(self, n_total: int) -> None:
        if self.total != n_total:
            raise ValueError(f"compartments sum to {self.total}, expected {n_total}")

    def as_vector(self) -> np.ndarray:
        """13-vector in engine STATE_COLUMNS order."""
        led = self.q_q_ledger
        return np.array(
            [getattr(self, name) for name in COMPARTMENTS]
            + [led.exposed, led.infectious, led.recovered],
            dtype=np.int64,
        )

    @classmethod
    def from_vector(cls, vec) -> "CompartmentState":
        vec = [int(v) for v in vec]
        kwargs = dict(zip(COMPARTMENTS, vec[:10]))
        kwargs["q_q_ledger"] = QuarantineLedger(*vec[10:13])
        return cls(**kwargs)


@dataclass(frozen=True)
class DailyFlows:
    """Realized transition counts for one day, one field per directed flow."""

    n_se: int = 0
    n_ssq: int = 0
    n_sqs: int = 0
    n_eia: int = 0
    n_eis: int = 0
    n_eqq: int = 0
    n_iait: int = 0
    n_iaqq: int = 0
    n_iaru: int = 0
    n_isit: int = 0
    n_isru: int = 0
    n_itqi: int = 0
    n_qird: int = 0
    n_qqit: int = 0
    n_qqru: int = 0
    n_ruqq: int = 0

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FLOW_NAMES], dtype=np.int64)

    @classmethod
    def from_vector(cls, vec) -> "DailyFlows":
        return cls(**{name: int(v) for name, v in zip(FLOW_NAMES, vec)})


@dataclass(frozen=True)
class Trajectory:
    """One simulated semester: states for days 0..horizon and daily flows.

    ``states`` has shape (horizon+1, 13) in STATE_COLUMNS order, ``flows``
    (horizon, 16) in FLOW_NAMES order.  ``injected`` records how many
    exposures the break-return injection actually added (bounded by the
    susceptibles available that day).
    """

    params: ModelParams
    init: CompartmentState
    states: np.ndarray
    flows: np.ndarray
    horizon: int
    seed: int | None = None
    stream_index: int = 0
    injected: int = 0

    def state_at(self, day: int) -> CompartmentState:
        return CompartmentState.from_vector(self.states[day])

    def flows_at(self, day: int) -> DailyFlows:
        """Flows applied during the transition from ``day`` to ``day+1``."""
        return DailyFlows.from_vector(self.flows[day])

    @property
    def daily_cases(self) -> np.ndarray:
        """Positive results returned per day (the n_ItQi flow)."""
        return self.flows[:, FLOW_NAMES.index("n_itqi")]


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Deterministic, independent random stream for trajectory ``index``.

    Identical (seed, index) pairs always give identical streams; distinct
    indices give statistically independent streams, so trajectories can be
    generated on any number of workers in any order.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def binomial_draw(n: int, p: float, rng: np.random.Generator) -> int:
    """Exact Binomial(n, p) sample."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return int(rng.binomial(n, p))


def partition_departures(n: int, probs, rng: np.random.Generator) -> list[int]:
    """Split ``n`` individuals among destinations with the given probabilities.

    Joint multinomial draw over the destinations plus an implicit "stay", so
    the total number of departures can never exceed ``n``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    probs = [float(p) for p in probs]
    if any(p < 0.0 for p in probs):
        raise ValueError("probabilities must be >= 0")
    if sum(probs) > 1.0 + 1e-12:
        raise ValueError(f"probabilities sum to {sum(probs)}, must be <= 1")
    counts = engine.partition_counts(np.array([n], dtype=np.int64), probs, rng)
    return [int(c[0]) for c in counts]


def force_of_infection(state: CompartmentState, params: ModelParams) -> float:
    """Per-susceptible daily infection probability.

    Only the circulating infectious compartments (i_a, i_s, i_t) exert
    pressure; quarantined, isolated and recovered individuals contribute
    nothing, reflecting the perfect-quarantine assumption.  Clamped to 1.
    """
    pressure = params.beta * (state.i_a + state.i_s + state.i_t) / params.n_total
    return min(1.0, pressure)


def step(
    state: CompartmentState,
    params: ModelParams,
    day: int,
    rng: np.random.Generator,
) -> tuple[CompartmentState, DailyFlows]:
    """Advance the state by one day and report the realized flows.

    ``day`` is informational only; break injection is handled by
    :func:`simulate`, not by the kernel.
    """
    state.validate_total(params.n_total)
    result = engine.run_batch(
        beta=params.beta,
        alpha=params.alpha,
        i_out=0,
        mu=params.mu,
        gamma=params.gamma,
        sigma=params.sigma,
        tau_f=params.tau_f,
        tau_s=params.tau_s,
        tau_r=params.tau_r,
        r_i=params.r_i,
        r_q=params.r_q,
        n_cc=params.n_cc,
        n_total=params.n_total,
        break_return_day=0,
        init=state.as_vector(),
        horizon=1,
        rng=rng,
        batch=1,
        record=True,
    )
    new_state = CompartmentState.from_vector(result.states[0, 1])
    flows = DailyFlows.from_vector(result.flows[0, 0])
    return new_state, flows


def apply_break_injection(state: CompartmentState, params: ModelParams) -> CompartmentState:
    """Move min(i_out, s) students from s to e when the break ends."""
    moved = min(params.i_out, state.s)
    return replace(state, s=state.s - moved, e=state.e + moved)


def simulate(
    params: ModelParams,
    init: CompartmentState,
    horizon_days: int,
    rng: np.random.Generator | None = None,
    *,
    seed: int | None = None,
    stream_index: int = 0,
) -> Trajectory:
    """Simulate one trajectory of ``horizon_days`` days.

    Pass either a Generator or a (seed, stream_index) pair; the latter is the
    reproducible form used by every CLI entry point.  The break injection is
    applied at the start of day ``params.break_return_day`` (0 disables it).
    """
    if horizon_days < 1:
        raise ValueError(f"horizon_days must be >= 1, got {horizon_days}")
    init.validate_total(params.n_total)
    if rng is None:
        if seed is None:
            raise ValueError("either rng or seed must be given")
        rng = trajectory_rng(seed, stream_index)
    result = engine.run_batch(
        beta=params.beta,
        alpha=params.alpha,
        i_out=params.i_out,
        mu=params.mu,
        gamma=params.gamma,
        sigma=params.sigma,
        tau_f=params.tau_f,
        tau_s=params.tau_s,
        tau_r=params.tau_r,
        r_i=params.r_i,
        r_q=params.r_q,
        n_cc=params.n_cc,
        n_total=params.n_total,
        break_return_day=params.break_return_day,
        init=init.as_vector(),
        horizon=horizon_days,
        rng=rng,
        batch=1,
        record=True,
    )
    return Trajectory(
        params=params,
        init=init,
        states=result.states[0],
        flows=result.flows[0],
        horizon=horizon_days,
        seed=seed,
        stream_index=stream_index,
        injected=int(result.injected[0]),
    )


def params_vector_fields(params: ModelParams) -> dict:
    """Engine keyword arguments for the fixed (non-fitted) parameters."""
    return dict(
        mu=params.mu,
        gamma=params.gamma,
        sigma=params.sigma,
        tau_f=params.tau_f,
        tau_s=params.tau_s,
        tau_r=params.tau_r,
        r_i=params.r_i,
        r_q=params.r_q,
        n_cc=params.n_cc,
        n_total=params.n_total,
        break_return_day=params.break_return_day,
    )
