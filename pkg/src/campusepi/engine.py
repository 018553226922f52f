"""Vectorized day-step kernel for the extended chain-binomial campus model.

The kernel advances a batch of trajectories simultaneously.  All compartment
occupancies are (B,) int64 arrays and every daily transition count is drawn
with numpy Generator routines (exact binomial / hypergeometric samplers, no
normal approximation).  The transmission parameters ``beta``, ``alpha`` and
``i_out`` may vary per batch element, which is what makes grid sweeps and
posterior ensembles cheap on a single core.

Compartments
    s      susceptible
    s_q    susceptible, quarantined as a close contact
    e      exposed (infected, not yet infectious or detectable)
    i_a    infectious, asymptomatic
    i_s    infectious, symptomatic
    i_t    infectious, tested and awaiting the result
    q_i    isolation (confirmed positive)
    q_q    quarantined close contacts who are not susceptible; tracked by an
           internal ledger (exposed / infectious / recovered-undetected)
    r_d    recovered, detected
    r_u    recovered, undetected

Daily update order (all exit draws use start-of-day occupancies; joint exits
from one compartment are partitioned with a single multinomial so outflow can
never exceed occupancy):

    1. infection             s   -> e      prob min(1, beta*(i_a+i_s+i_t)/N)
    2. progression           e   -> i_a    (1-alpha)*mu   |  e -> i_s  alpha*mu
    3. asymptomatic exits    i_a -> i_t    sigma*tau_f    |  i_a -> r_u  (1-sigma)*gamma
    4. symptomatic exits     i_s -> i_t    tau_s          |  i_s -> r_u  gamma
    5. result return         i_t -> q_i    tau_r
    6. isolation release     q_i -> r_d    r_i
    7. quarantine internals  ledger exposed -> infectious at mu; ledger
       infectious tested at tau_s (q_q -> i_t); every ledger state also
       competes with release to r_u at r_q
    8. quarantine release    s_q -> s      r_q
    9. close-contact intake  n_cc contacts per new isolation entry, drawn
       without replacement from the current {s, e, i_a, r_u} pool; s goes to
       s_q, the others to q_q with matching ledger tags
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COMPARTMENTS = ("s", "s_q", "e", "i_a", "i_s", "i_t", "q_i", "q_q", "r_d", "r_u")

LEDGER_STATES = ("exposed", "infectious", "recovered")

FLOW_NAMES = (
    "n_se", "n_ssq", "n_sqs",
    "n_eia", "n_eis", "n_eqq",
    "n_iait", "n_iaqq", "n_iaru",
    "n_isit", "n_isru",
    "n_itqi", "n_qird",
    "n_qqit", "n_qqru", "n_ruqq",
)

# Column layout of recorded state arrays: the ten compartments followed by the
# three q_q ledger entries.
STATE_COLUMNS = COMPARTMENTS + ("q_q_exposed", "q_q_infectious", "q_q_recovered")


def clamp_exit_probs(*probs):
    """Rescale competing exit probabilities so their sum is at most 1.

    In the calibrated parameter regime the sums are well below 1 and the
    probabilities pass through unchanged (marginal rates are preserved).
    Under adversarial rates the vector is scaled down proportionally, which
    keeps the joint draw a valid partition of the compartment.
    """
    arrs = [np.asarray(p, dtype=float) for p in probs]
    total = sum(arrs)
    scale = np.where(total > 1.0, 1.0 / np.maximum(total, 1e-300), 1.0)
    return tuple(a * scale for a in arrs)


def partition_counts(n, probs, rng):
    """Multinomial split of ``n`` among len(probs) destinations plus "stay".

    Drawn as sequential conditional binomials, which is an exact construction
    of the multinomial law and lets each destination probability be a scalar
    or an array broadcast against ``n``.  Callers must ensure sum(probs) <= 1.
    """
    n = np.asarray(n)
    remaining = n
    remaining_p = np.ones(n.shape)
    out = []
    for p in probs:
        p = np.broadcast_to(np.asarray(p, dtype=float), n.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(remaining_p > 0.0, p / remaining_p, 1.0)
        q = np.clip(q, 0.0, 1.0)
        x = rng.binomial(remaining, q)
        out.append(x)
        remaining = remaining - x
        remaining_p = remaining_p - p
    return out


def split_pool(pools, take, rng):
    """Draw ``take`` individuals without replacement from stacked pools.

    ``pools`` is a sequence of (B,) occupancy arrays; the result is one draw
    count per pool, distributed multivariate-hypergeometrically (sampled as a
    chain of univariate hypergeometric draws).  ``take`` must not exceed the
    pooled total.
    """
    remaining = np.asarray(take)
    tail = np.zeros_like(remaining)
    for pool in pools[:0:-1]:
        tail = tail + pool
    out = []
    for i, pool in enumerate(pools[:-1]):
        x = rng.hypergeometric(pool, tail, remaining)
        out.append(x)
        remaining = remaining - x
        if i + 2 < len(pools):
            tail = tail - pools[i + 1]
    out.append(remaining)
    return out


@dataclass
class BatchResult:
    """Aggregates produced by one batch run.

    ``daily_cases`` holds the n_ItQi flow (returned positive results) per day,
    which is the case-count definition used everywhere downstream.  ``states``
    and ``flows`` are populated only when the run records full trajectories.
    """

    daily_cases: np.ndarray            # (B, horizon) int64
    final_state: np.ndarray            # (B, 13) int64, STATE_COLUMNS layout
    quarantine_entries: np.ndarray     # (B,) cumulative entries into s_q + q_q
    peak_quar_iso: np.ndarray          # (B,) max over days of s_q + q_q + q_i
    symptomatic_tests: np.ndarray      # (B,) cumulative n_isit
    quarantine_tests: np.ndarray       # (B,) cumulative n_qqit
    injected: np.ndarray               # (B,) exposures added at the break return
    states: np.ndarray | None = None   # (B, horizon+1, 13) when recorded
    flows: np.ndarray | None = None    # (B, horizon, 16) when recorded


def run_batch(
    *,
    beta,
    alpha,
    i_out,
    mu: float,
    gamma: float,
    sigma: float,
    tau_f: float,
    tau_s: float,
    tau_r: float,
    r_i: float,
    r_q: float,
    n_cc: int,
    n_total: int,
    break_return_day: int,
    init: np.ndarray,
    horizon: int,
    rng: np.random.Generator,
    batch: int,
    record: bool = False,
) -> BatchResult:
    """Simulate ``batch`` trajectories for ``horizon`` days.

    ``beta``, ``alpha`` and ``i_out`` may be scalars or (batch,) arrays;
    everything else is shared by the whole batch.  ``init`` is a 13-vector in
    STATE_COLUMNS order (or a (batch, 13) array).
    """
    B = batch
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (B,))
    alpha = np.asarray(alpha, dtype=float)
    i_out = np.broadcast_to(np.asarray(i_out, dtype=np.int64), (B,))

    init = np.asarray(init, dtype=np.int64)
    if init.ndim == 1:
        init = np.broadcast_to(init, (B, init.shape[0]))
    s, sq, e, ia, is_, it, qi, _qq, rd, ru, qqe, qqi, qqr = (
        init[:, k].copy() for k in range(13)
    )

    # Exit probability vectors are constant over the run; clamp once.
    p_e = clamp_exit_probs((1.0 - alpha) * mu, alpha * mu)
    p_ia = clamp_exit_probs(sigma * tau_f, (1.0 - sigma) * gamma)
    p_is = clamp_exit_probs(tau_s, gamma)
    p_qqe = clamp_exit_probs(mu, r_q)
    p_qqi = clamp_exit_probs(tau_s, r_q)

    zeros = np.zeros(B, dtype=np.int64)
    daily_cases = np.zeros((B, horizon), dtype=np.int64)
    quarantine_entries = zeros.copy()
    peak_quar_iso = sq + qqe + qqi + qqr + qi
    symptomatic_tests = zeros.copy()
    quarantine_tests = zeros.copy()
    injected = zeros.copy()

    states = flows = None
    if record:
        states = np.zeros((B, horizon + 1, 13), dtype=np.int64)
        flows = np.zeros((B, horizon, 16), dtype=np.int64)
        states[:, 0, :] = np.column_stack(
            [s, sq, e, ia, is_, it, qi, qqe + qqi + qqr, rd, ru, qqe, qqi, qqr]
        )

    inv_n = 1.0 / float(n_total)
    for day in range(horizon):
        if break_return_day and day == break_return_day:
            moved = np.minimum(i_out, s)
            s = s - moved
            e = e + moved
            injected = moved

        infectious = ia + is_ + it
        if infectious.any():
            p_inf = np.minimum(1.0, beta * infectious * inv_n)
            n_se = rng.binomial(s, p_inf)
        else:
            n_se = zeros
        if e.any():
            n_eia, n_eis = partition_counts(e, p_e, rng)
        else:
            n_eia = n_eis = zeros
        if ia.any():
            n_iait, n_iaru = partition_counts(ia, p_ia, rng)
        else:
            n_iait = n_iaru = zeros
        if is_.any():
            n_isit, n_isru = partition_counts(is_, p_is, rng)
        else:
            n_isit = n_isru = zeros
        n_itqi = rng.binomial(it, tau_r) if it.any() else zeros
        n_qird = rng.binomial(qi, r_i) if qi.any() else zeros
        if qqe.any():
            n_prog, rel_e = partition_counts(qqe, p_qqe, rng)
        else:
            n_prog = rel_e = zeros
        if qqi.any():
            n_qqit, rel_i = partition_counts(qqi, p_qqi, rng)
        else:
            n_qqit = rel_i = zeros
        rel_r = rng.binomial(qqr, r_q) if qqr.any() else zeros
        n_sqs = rng.binomial(sq, r_q) if sq.any() else zeros

        s = s - n_se + n_sqs
        e = e + n_se - n_eia - n_eis
        ia = ia + n_eia - n_iait - n_iaru
        is_ = is_ + n_eis - n_isit - n_isru
        it = it + n_iait + n_isit + n_qqit - n_itqi
        qi = qi + n_itqi - n_qird
        rd = rd + n_qird
        ru = ru + n_iaru + n_isru + rel_e + rel_i + rel_r
        qqe = qqe - n_prog - rel_e
        qqi = qqi + n_prog - n_qqit - rel_i
        qqr = qqr - rel_r
        sq = sq - n_sqs

        # Close-contact intake, driven by today's new isolation entries.
        demand = n_cc * n_itqi
        if demand.any():
            pool = s + e + ia + ru
            take = np.minimum(demand, pool)
            n_ssq, n_eqq, n_iaqq, n_ruqq = split_pool((s, e, ia, ru), take, rng)
            s = s - n_ssq
            sq = sq + n_ssq
            e = e - n_eqq
            qqe = qqe + n_eqq
            ia = ia - n_iaqq
            qqi = qqi + n_iaqq
            ru = ru - n_ruqq
            qqr = qqr + n_ruqq
        else:
            n_ssq = n_eqq = n_iaqq = n_ruqq = zeros

        daily_cases[:, day] = n_itqi
        quarantine_entries += n_ssq + n_eqq + n_iaqq + n_ruqq
        symptomatic_tests += n_isit
        quarantine_tests += n_qqit
        occupancy = sq + qqe + qqi + qqr + qi
        np.maximum(peak_quar_iso, occupancy, out=peak_quar_iso)

        if record:
            states[:, day + 1, :] = np.column_stack(
                [s, sq, e, ia, is_, it, qi, qqe + qqi + qqr, rd, ru, qqe, qqi, qqr]
            )
            flows[:, day, :] = np.column_stack([
                n_se, n_ssq, n_sqs,
                n_eia, n_eis, n_eqq,
                n_iait, n_iaqq, n_iaru,
                n_isit, n_isru,
                n_itqi, n_qird,
                n_qqit, rel_e + rel_i + rel_r, n_ruqq,
            ])

    final_state = np.column_stack(
        [s, sq, e, ia, is_, it, qi, qqe + qqi + qqr, rd, ru, qqe, qqi, qqr]
    )
    return BatchResult(
        daily_cases=daily_cases,
        final_state=final_state,
        quarantine_entries=quarantine_entries,
        peak_quar_iso=peak_quar_iso,
        symptomatic_tests=symptomatic_tests,
        quarantine_tests=quarantine_tests,
        injected=injected,
        states=states,
        flows=flows,
    )
