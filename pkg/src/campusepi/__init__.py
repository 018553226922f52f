"""Stochastic campus epidemic toolkit.

Chain-binomial extended-SEIR simulation, peak-statistic rejection fitting,
next-generation-matrix R0, posterior ensembles with functional boxplots, and
surveillance-testing policy sweeps.
"""

from .abc import (
    AcceptanceSurface,
    CredibleIntervals,
    NoAcceptancesError,
    PosteriorSample,
    PriorAxis,
    PriorGrid,
    SimConfig,
    build_grid,
    marginal_ci,
    run_abc,
    run_abc_multi,
    run_simulation_study,
)
from .config import RunConfig, load_config
from .ensemble import (
    CurveMatrix,
    FunctionalBand,
    draw_posterior_params,
    functional_band,
    simulate_ensemble,
)
from .model import (
    CompartmentState,
    DailyFlows,
    ModelParams,
    QuarantineLedger,
    Trajectory,
    apply_break_injection,
    binomial_draw,
    force_of_infection,
    partition_departures,
    simulate,
    step,
    trajectory_rng,
)
from .peaks import MatchThresholds, PeakSet, abc_match, detect_peaks, weekly_cases
from .policy import (
    PolicyReport,
    Strategy,
    default_strategy_grid,
    run_policy_sweep,
    tests_administered,
)
from .rzero import NextGenInputs, build_fv, r0_closed_form, r0_spectral

__version__ = "0.1.0"
