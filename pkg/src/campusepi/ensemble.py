"""Posterior-predictive ensembles and their functional-boxplot summary.

Curves are ranked by modified band depth (MBD) with bands spanned by all
pairs of sample curves: the depth of a curve is the average, over pairs and
weeks, of the indicator that the curve lies inside the pair's envelope.  The
deepest curve is the median; the pointwise envelope of the deepest half forms
the central region, and fences inflate that region by 1.5x its width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .abc import PosteriorSample
from .model import params_vector_fields
from .peaks import weekly_series_from_daily

__all__ = [
    "CurveMatrix",
    "FunctionalBand",
    "draw_posterior_params",
    "simulate_ensemble",
    "band_depths",
    "functional_band",
]

_DOMAIN_ENSEMBLE = 4


@dataclass
class CurveMatrix:
    """k weekly case curves plus the posterior draw that produced each."""

    curves: np.ndarray   # (k, weeks) int
    draws: np.ndarray    # (k, 3) alpha, beta, i_out

    def __post_init__(self):
        if self.curves.ndim != 2 or self.curves.shape[0] < 1:
            raise ValueError("curves must be a non-empty (k, weeks) matrix")


@dataclass
class FunctionalBand:
    median: np.ndarray
    band_low: np.ndarray
    band_high: np.ndarray
    fence_low: np.ndarray
    fence_high: np.ndarray
    outliers: np.ndarray      # indices of curves leaving the fences anywhere
    depths: np.ndarray
    median_index: int


def draw_posterior_params(
    posterior: PosteriorSample, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample k parameter triples with replacement, weighted by acceptances."""
    if posterior.total_accepted == 0:
        raise ValueError("posterior is empty")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return np.empty((0, 3))
    weights = posterior.accepted / posterior.total_accepted
    idx = rng.choice(posterior.grid.shape[0], size=k, p=weights)
    return posterior.grid[idx]


def simulate_ensemble(param_draws: np.ndarray, sim_config, seed: int) -> CurveMatrix:
    """One weekly case curve per parameter draw, in a single seeded batch."""
    param_draws = np.asarray(param_draws, dtype=float)
    if param_draws.ndim != 2 or param_draws.shape[1] != 3:
        raise ValueError("param_draws must be (k, 3) of (alpha, beta, i_out)")
    k = param_draws.shape[0]
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((seed, _DOMAIN_ENSEMBLE)))
    )
    result = engine.run_batch(
        beta=param_draws[:, 1],
        alpha=param_draws[:, 0],
        i_out=param_draws[:, 2].astype(np.int64),
        init=sim_config.init.as_vector(),
        horizon=sim_config.horizon,
        rng=rng,
        batch=k,
        record=False,
        **params_vector_fields(sim_config.params),
    )
    return CurveMatrix(
        curves=weekly_series_from_daily(result.daily_cases),
        draws=param_draws,
    )


def band_depths(curves: np.ndarray) -> np.ndarray:
    """Modified band depth of every curve, bands spanned by curve pairs.

    Computed per week from the counts strictly above and strictly below each
    value: a pair fails to cover the value only when both members are on the
    same strict side, so coverage = C(k,2) - C(below,2) - C(above,2).
    """
    curves = np.asarray(curves, dtype=float)
    k, w = curves.shape
    pairs = k * (k - 1) / 2.0
    covered = np.zeros(k)
    for t in range(w):
        col = curves[:, t]
        order = np.sort(col)
        below = np.searchsorted(order, col, side="left")
        above = k - np.searchsorted(order, col, side="right")
        covered += pairs - below * (below - 1) / 2.0 - above * (above - 1) / 2.0
    return covered / (pairs * w)


def functional_band(curves) -> FunctionalBand:
    """Summarize an ensemble of curves as a functional boxplot band."""
    if isinstance(curves, CurveMatrix):
        curves = curves.curves
    curves = np.asarray(curves)
    if curves.ndim != 2:
        raise ValueError("curves must be a (k, weeks) matrix")
    k = curves.shape[0]
    if k < 4:
        raise ValueError(f"need at least 4 curves for a functional band, got {k}")

    depths = band_depths(curves)
    median_index = int(np.argmax(depths))
    n_central = -(-k // 2)
    central = np.argsort(-depths, kind="stable")[:n_central]
    band_low = curves[central].min(axis=0)
    band_high = curves[central].max(axis=0)
    width = band_high - band_low
    fence_low = band_low - 1.5 * width
    fence_high = band_high + 1.5 * width
    outside = (curves < fence_low) | (curves > fence_high)
    outliers = np.nonzero(outside.any(axis=1))[0]
    return FunctionalBand(
        median=curves[median_index].copy(),
        band_low=band_low,
        band_high=band_high,
        fence_low=fence_low,
        fence_high=fence_high,
        outliers=outliers,
        depths=depths,
        median_index=median_index,
    )
