"""Simulate one semester and look at what the surveillance program sees.

The model tracks 6,500 students through ten compartments with daily binomial
transitions.  Three exposed students arrive on day 0; over fall break 100
more pick up the virus off campus and return exposed on day 77.
"""

from campusepi import ModelParams, detect_peaks, simulate, weekly_cases
from campusepi.config import RunConfig
from campusepi.dataio import write_trajectory_csv

config = RunConfig()
params = ModelParams(alpha=0.3, beta=0.3, i_out=100)

trajectory = simulate(params, config.initial_state(), config.horizon, seed=7)

weekly = weekly_cases(trajectory)
print("weekly confirmed cases:", list(map(int, weekly)))
print("peaks (week, height):", [(p["week"], p["height"]) for p in detect_peaks(weekly).as_records()])

final = trajectory.state_at(config.horizon)
print(f"semester totals: {int(weekly.sum())} confirmed cases, "
      f"{final.r_u} undetected recoveries, "
      f"{final.s_q + final.q_q} still in quarantine on the last day")
print(f"break-return injection moved {trajectory.injected} students to exposed")

write_trajectory_csv(trajectory, "outbreak_trajectory.csv")
print("full day-by-day ledger written to outbreak_trajectory.csv")
