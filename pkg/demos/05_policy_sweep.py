"""Compare the nine surveillance-testing strategies under the fitted posterior.

Strategies share posterior draws and random streams (common random numbers),
so outcome differences are attributable to the policy levers alone: the
proportion of students tested and how often they are tested.
"""

import json
from importlib import resources

import numpy as np

from campusepi import SimConfig, default_strategy_grid, run_policy_sweep
from campusepi.abc import PosteriorSample

payload = json.loads(
    resources.files("campusepi").joinpath("data/default_posterior.json").read_text()
)
posterior = PosteriorSample(
    grid=np.array(payload["grid"]),
    accepted=np.array(payload["accepted"]),
    attempted=np.array(payload["attempted"]),
)

reports = run_policy_sweep(
    default_strategy_grid(), posterior, n_per_strategy=200,
    sim_config=SimConfig(), seed=0,
)

print(f"{'strategy':30s} {'cases':>8s} {'quar@end':>9s} {'peak occ':>9s} {'tests':>9s}")
for r in reports:
    print(f"{r.strategy.label:30s} {r.cumulative_cases['q50']:8.0f} "
          f"{r.final_quarantine['q50']:9.0f} {r.peak_quar_iso['q50']:9.0f} "
          f"{r.tests_administered['q50']:9.0f}")

base, aggressive = reports[0], reports[-1]
case_drop = 1 - aggressive.cumulative_cases["q50"] / base.cumulative_cases["q50"]
quar_drop = 1 - aggressive.final_quarantine["q50"] / base.final_quarantine["q50"]
print(f"\nmost aggressive vs baseline: cases reduced {case_drop:.0%}, "
      f"end-of-semester quarantine reduced {quar_drop:.0%}")
print("testing hard cuts confirmed cases, but students quarantined at the end")
print("of the semester barely move: the post-break import wave lands too close")
print("to finals for any surveillance cadence to head it off")
