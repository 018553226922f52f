"""Basic reproduction number from the next-generation matrices.

The infected classes are ordered (e, i_a, i_s, i_t).  F holds the new
infection rates (only its first row is nonzero) and V the remaining
transitions among infected classes; R0 is the spectral radius of F V^-1.
Because F = e1 b^T is rank one, that spectral radius collapses to
b^T V^-1 e1, which is how :func:`r0_spectral` computes it.

At the calibrated fixed rates (sigma = 0.4, 14-day testing interval,
14-day undetected infectious period, 2-day symptom-to-test and result
delays) the exact value reduces to the closed form (14.8 - 10.8*alpha)*beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams

__all__ = ["NextGenInputs", "build_fv", "r0_spectral", "r0_closed_form"]


@dataclass(frozen=True)
class NextGenInputs:
    """The parameter subset entering F and V."""

    alpha: float
    beta: float
    mu: float = 1.0 / 3.0
    gamma: float = 1.0 / 14.0
    sigma: float = 0.4
    tau_f: float = 1.0 / 14.0
    tau_s: float = 1.0 / 2.0
    tau_r: float = 1.0 / 2.0

    @classmethod
    def from_params(cls, params: ModelParams) -> "NextGenInputs":
        return cls(
            alpha=params.alpha,
            beta=params.beta,
            mu=params.mu,
            gamma=params.gamma,
            sigma=params.sigma,
            tau_f=params.tau_f,
            tau_s=params.tau_s,
            tau_r=params.tau_r,
        )


def build_fv(inputs: NextGenInputs) -> tuple[np.ndarray, np.ndarray]:
    """Construct the 4x4 new-infection matrix F and transition matrix V.

    Raises LinAlgError when a diagonal rate of V vanishes (V singular).
    """
    a, b = inputs.alpha, inputs.beta
    exit_ia = inputs.sigma * inputs.tau_f + (1.0 - inputs.sigma) * inputs.gamma
    F = np.zeros((4, 4))
    F[0, 1:] = b
    V = np.array([
        [inputs.mu, 0.0, 0.0, 0.0],
        [-(1.0 - a) * inputs.mu, exit_ia, 0.0, 0.0],
        [-a * inputs.mu, 0.0, inputs.tau_s, 0.0],
        [0.0, -inputs.sigma * inputs.tau_f, -inputs.tau_s, inputs.tau_r],
    ])
    if np.any(np.diag(V) == 0.0):
        raise np.linalg.LinAlgError(
            "V is singular: a diagonal transition rate is zero"
        )
    return F, V


def r0_spectral(inputs: NextGenInputs) -> float:
    """Spectral radius of F V^-1 via the rank-1 reduction b^T V^-1 e1."""
    F, V = build_fv(inputs)
    x = np.linalg.solve(V, np.array([1.0, 0.0, 0.0, 0.0]))
    return float(F[0] @ x)


def r0_closed_form(alpha: float, beta: float) -> float:
    """Closed-form R0 valid at the calibrated fixed rates only."""
    return (14.8 - 10.8 * alpha) * beta
