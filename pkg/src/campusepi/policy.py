"""Surveillance-testing strategy sweeps under posterior parameters.

Each strategy fixes the tested proportion sigma and the testing interval;
posterior parameter draws supply (alpha, beta, i_out).  Strategies share the
posterior draws and, by default, the trajectory random stream (common random
numbers), so outcome differences between strategies are not diluted by
sampling noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .abc import PosteriorSample
from .ensemble import draw_posterior_params
from .model import ModelParams, Trajectory, params_vector_fields

__all__ = [
    "Strategy",
    "PolicyReport",
    "default_strategy_grid",
    "tests_administered",
    "run_policy_sweep",
]

_DOMAIN_POSTERIOR = 5
_DOMAIN_POLICY = 6

QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class Strategy:
    """A surveillance configuration: who is tested and how often."""

    sigma: float
    interval_days: float
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must be in [0, 1], got {self.sigma}")
        if self.interval_days < 1.0:
            raise ValueError(f"interval_days must be >= 1, got {self.interval_days}")

    @property
    def tau_f(self) -> float:
        return 1.0 / self.interval_days


def default_strategy_grid() -> list[Strategy]:
    """The nine simulated strategies; the first row is the baseline program."""
    frequencies = [(14.0, "every 14 days"), (7.0, "weekly"), (3.5, "twice weekly")]
    out = []
    for sigma in (0.4, 0.6, 0.8):
        for interval, freq_label in frequencies:
            out.append(Strategy(
                sigma=sigma,
                interval_days=interval,
                label=f"{int(sigma * 100)}% tested {freq_label}",
            ))
    return out


@dataclass
class PolicyReport:
    """Outcome distribution summary for one strategy."""

    strategy: Strategy
    n_draws: int
    cumulative_cases: dict[str, float]        # quantiles of detected cases at horizon
    quarantine_entries: dict[str, float]      # quantiles of cumulative entries into s_q+q_q
    final_quarantine: dict[str, float]        # quantiles of s_q+q_q occupancy on the last day
    peak_quar_iso: dict[str, float]           # quantiles of max daily s_q+q_q+q_i occupancy
    tests_administered: dict[str, float]
    daily_cases_median: np.ndarray
    daily_cases_q25: np.ndarray
    daily_cases_q75: np.ndarray

    def as_dict(self) -> dict:
        # integral floats are serialized as ints so JSON tokens match the
        # canonical JavaScript rendering of the same numbers
        return {
            "label": self.strategy.label,
            "sigma": _json_number(self.strategy.sigma),
            "interval_days": _json_number(self.strategy.interval_days),
            "n_draws": self.n_draws,
            "cumulative_cases": _json_quantiles(self.cumulative_cases),
            "quarantine_entries": _json_quantiles(self.quarantine_entries),
            "final_quarantine": _json_quantiles(self.final_quarantine),
            "peak_quar_iso": _json_quantiles(self.peak_quar_iso),
            "tests_administered": _json_quantiles(self.tests_administered),
            "daily_cases_median": [int(v) for v in self.daily_cases_median],
            "daily_cases_q25": [_json_number(float(v)) for v in self.daily_cases_q25],
            "daily_cases_q75": [_json_number(float(v)) for v in self.daily_cases_q75],
        }


def _surveillance_tests(sigma: float, tau_f: float, n_total: int, days: int) -> float:
    # Whole-pool cost: the campus pays for negative results too.
    return sigma * n_total * tau_f * days


def tests_administered(trajectory: Trajectory, strategy: Strategy, params: ModelParams) -> int:
    """Total tests used by one trajectory under a strategy.

    Surveillance tests accrue for the whole tested pool every day
    (sigma * N * tau_f, summed over days and rounded once, keeping the total
    exactly linear in tau_f); symptomatic and quarantine testing add the
    realized i_s -> i_t and q_q -> i_t transitions.
    """
    days = trajectory.flows.shape[0]
    surveillance = _surveillance_tests(strategy.sigma, strategy.tau_f, params.n_total, days)
    idx_isit = engine.FLOW_NAMES.index("n_isit")
    idx_qqit = engine.FLOW_NAMES.index("n_qqit")
    triggered = int(trajectory.flows[:, idx_isit].sum() + trajectory.flows[:, idx_qqit].sum())
    return int(round(surveillance)) + triggered


def run_policy_sweep(
    strategies: list[Strategy],
    posterior: PosteriorSample,
    n_per_strategy: int,
    sim_config,
    seed: int,
    common_random_numbers: bool = True,
) -> list[PolicyReport]:
    """Simulate every strategy under posterior parameters and summarize."""
    if not strategies:
        raise ValueError("need at least one strategy")
    if n_per_strategy < 1:
        raise ValueError("n_per_strategy must be >= 1")

    draw_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((seed, _DOMAIN_POSTERIOR)))
    )
    draws = draw_posterior_params(posterior, n_per_strategy, draw_rng)

    reports = []
    for s_idx, strategy in enumerate(strategies):
        stream_key = (seed, _DOMAIN_POLICY) if common_random_numbers else (seed, _DOMAIN_POLICY, s_idx)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(stream_key)))
        params = sim_config.params.with_values(sigma=strategy.sigma, tau_f=strategy.tau_f)
        fixed = params_vector_fields(params)
        result = engine.run_batch(
            beta=draws[:, 1],
            alpha=draws[:, 0],
            i_out=draws[:, 2].astype(np.int64),
            init=sim_config.init.as_vector(),
            horizon=sim_config.horizon,
            rng=rng,
            batch=n_per_strategy,
            record=False,
            **fixed,
        )
        days = sim_config.horizon
        surveillance = round(_surveillance_tests(strategy.sigma, strategy.tau_f, params.n_total, days))
        tests = surveillance + result.symptomatic_tests + result.quarantine_tests
        cumulative = result.daily_cases.sum(axis=1)
        sq = result.final_state[:, engine.STATE_COLUMNS.index("s_q")]
        qq = result.final_state[:, engine.STATE_COLUMNS.index("q_q")]
        reports.append(PolicyReport(
            strategy=strategy,
            n_draws=n_per_strategy,
            cumulative_cases=_quantiles(cumulative),
            quarantine_entries=_quantiles(result.quarantine_entries),
            final_quarantine=_quantiles(sq + qq),
            peak_quar_iso=_quantiles(result.peak_quar_iso),
            tests_administered=_quantiles(tests),
            daily_cases_median=np.median(result.daily_cases, axis=0),
            daily_cases_q25=np.quantile(result.daily_cases, 0.25, axis=0),
            daily_cases_q75=np.quantile(result.daily_cases, 0.75, axis=0),
        ))
    return reports


def _quantiles(values: np.ndarray) -> dict[str, float]:
    qs = np.quantile(values, QUANTILE_LEVELS)
    return {f"q{int(level * 100):02d}": float(v) for level, v in zip(QUANTILE_LEVELS, qs)}


def _json_number(value: float):
    return int(value) if float(value).is_integer() else float(value)


def _json_quantiles(summary: dict[str, float]) -> dict:
    return {key: _json_number(v) for key, v in summary.items()}
