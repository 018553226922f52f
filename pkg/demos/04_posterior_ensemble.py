"""Posterior case-count trajectories summarized by a functional boxplot.

Each curve is an equally plausible semester conditional on the fitted
posterior.  Curves are ranked by modified band depth; the deepest curve is
the median, the envelope of the deepest half is the central 50% region, and
fences extend it by 1.5x its width.
"""

import json
from importlib import resources

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from campusepi import SimConfig, draw_posterior_params, functional_band, simulate_ensemble
from campusepi.abc import PosteriorSample
from campusepi.dataio import parse_observed_csv

payload = json.loads(
    resources.files("campusepi").joinpath("data/default_posterior.json").read_text()
)
posterior = PosteriorSample(
    grid=np.array(payload["grid"]),
    accepted=np.array(payload["accepted"]),
    attempted=np.array(payload["attempted"]),
)

rng = np.random.default_rng(3)
draws = draw_posterior_params(posterior, 500, rng)
matrix = simulate_ensemble(draws, SimConfig(), seed=3)
band = functional_band(matrix)

weeks = np.arange(1, matrix.curves.shape[1] + 1)
observed = parse_observed_csv(
    resources.files("campusepi").joinpath("data/observed_weekly.csv")
).values

inside = ((observed >= band.band_low) & (observed <= band.band_high)).mean()
print(f"{matrix.curves.shape[0]} posterior trajectories, "
      f"{band.outliers.size} flagged as outliers")
print(f"median curve peaks at week {int(np.argmax(band.median)) + 1}")
print(f"observed series sits inside the central 50% band for {inside:.0%} of weeks")

fig, ax = plt.subplots(figsize=(8, 4.5))
ax.fill_between(weeks, band.fence_low, band.fence_high, color="#dbeafe", label="fences")
ax.fill_between(weeks, band.band_low, band.band_high, color="#93c5fd", label="central 50%")
ax.plot(weeks, band.median, color="#1d4ed8", lw=2, label="median curve")
ax.plot(weeks, observed, color="#db2777", lw=2, label="observed")
ax.set_xlabel("week of semester")
ax.set_ylabel("confirmed cases")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig("posterior_band.png", dpi=150)
print("figure saved to posterior_band.png")
