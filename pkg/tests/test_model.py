import numpy as np
import pytest

from campusepi.engine import FLOW_NAMES, STATE_COLUMNS
from campusepi.model import (
    CompartmentState,
    ModelParams,
    QuarantineLedger,
    apply_break_injection,
    binomial_draw,
    force_of_infection,
    partition_departures,
    simulate,
    step,
    trajectory_rng,
)

from oracles import meanfield_trajectory


@pytest.fixture
def rng():
    return trajectory_rng(123)


def default_init(params, exposed=10):
    return CompartmentState(s=params.n_total - exposed, e=exposed)


class TestParams:
    def test_defaults_are_calibrated_values(self):
        p = ModelParams()
        assert p.mu == pytest.approx(1 / 3)
        assert p.gamma == pytest.approx(1 / 14)
        assert p.tau_s == pytest.approx(1 / 2)
        assert p.tau_r == pytest.approx(1 / 2)
        assert p.r_i == pytest.approx(1 / 10)
        assert p.r_q == pytest.approx(1 / 14)
        assert p.n_cc == 10
        assert p.n_total == 6500

    @pytest.mark.parametrize("bad", [
        dict(beta=-0.1), dict(alpha=1.5), dict(sigma=2.0), dict(mu=1.01),
        dict(n_cc=-1), dict(n_total=0), dict(i_out=7000),
        dict(break_return_day=-3),
    ])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            ModelParams(**bad)


class TestState:
    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            CompartmentState(s=-1)

    def test_ledger_must_sum_to_qq(self):
        with pytest.raises(ValueError):
            CompartmentState(q_q=3, q_q_ledger=QuarantineLedger(exposed=1))
        state = CompartmentState(q_q=3, q_q_ledger=QuarantineLedger(exposed=1, recovered=2))
        assert state.q_q_ledger.total == 3

    def test_vector_round_trip(self):
        state = CompartmentState(s=5, e=2, i_a=1, q_q=4,
                                 q_q_ledger=QuarantineLedger(2, 1, 1), r_u=3)
        assert CompartmentState.from_vector(state.as_vector()) == state


class TestBinomialDraw:
    def test_empty_draw(self, rng):
        assert binomial_draw(0, 0.5, rng) == 0

    def test_zero_probability(self, rng):
        assert binomial_draw(17, 0.0, rng) == 0

    def test_certain_event(self, rng):
        assert binomial_draw(17, 1.0, rng) == 17

    def test_invalid_arguments(self, rng):
        with pytest.raises(ValueError):
            binomial_draw(-1, 0.5, rng)
        with pytest.raises(ValueError):
            binomial_draw(5, 1.5, rng)
        with pytest.raises(ValueError):
            binomial_draw(5, -0.1, rng)


class TestPartitionDepartures:
    def test_zero_probabilities(self, rng):
        assert partition_departures(10, [0.0, 0.0], rng) == [0, 0]

    def test_certain_single_destination(self, rng):
        assert partition_departures(10, [1.0], rng) == [10]

    def test_rejects_excess_probability(self, rng):
        with pytest.raises(ValueError):
            partition_departures(10, [0.7, 0.7], rng)

    def test_departures_never_exceed_n(self, rng):
        for _ in range(200):
            parts = partition_departures(13, [0.4, 0.35, 0.2], rng)
            assert sum(parts) <= 13
            assert all(p >= 0 for p in parts)

    def test_monte_carlo_means(self):
        # (1000, [0.25, 0.25]): each component has mean 250; the mean of
        # 10^4 draws has standard error sqrt(1000*0.25*0.75/10^4).
        rng = trajectory_rng(7)
        draws = np.array([partition_departures(1000, [0.25, 0.25], rng)
                          for _ in range(10_000)])
        se = np.sqrt(1000 * 0.25 * 0.75 / 10_000)
        assert abs(draws[:, 0].mean() - 250) <= 3 * se
        assert abs(draws[:, 1].mean() - 250) <= 3 * se


class TestForceOfInfection:
    def test_no_infectious_pressure(self):
        state = CompartmentState(s=100, r_u=5)
        assert force_of_infection(state, ModelParams()) == 0.0

    def test_direct_substitution(self):
        params = ModelParams(beta=0.4)
        state = CompartmentState(s=6435, i_a=30, i_s=20, i_t=15)
        assert force_of_infection(state, params) == pytest.approx(0.004, rel=1e-12)

    def test_clamped_to_one(self):
        params = ModelParams(beta=1.0, n_total=100)
        state = CompartmentState(i_a=200)
        assert force_of_infection(state, params) == 1.0

    def test_reads_only_circulating_infectious(self):
        # quarantined/isolated/recovered must not contribute ("perfect" quarantine)
        params = ModelParams()
        base = CompartmentState(s=1000, i_a=10, i_s=5, i_t=2)
        loaded = CompartmentState(
            s=1000, i_a=10, i_s=5, i_t=2, s_q=300, q_i=200, r_d=50, r_u=70,
            q_q=40, q_q_ledger=QuarantineLedger(10, 20, 10),
        )
        assert force_of_infection(base, params) == force_of_infection(loaded, params)


class TestStep:
    def test_disease_free_set_is_absorbing(self, rng):
        params = ModelParams()
        state = CompartmentState(s=5000, s_q=800, q_i=600, r_d=100)
        new, flows = step(state, params, 0, rng)
        assert flows.n_se == 0
        assert new.e == new.i_a == new.i_s == new.i_t == new.q_q == 0
        # only the release flows may move anyone
        assert new.s == state.s + flows.n_sqs
        assert new.r_d == state.r_d + flows.n_qird

    def test_beta_zero_never_infects(self):
        params = ModelParams(beta=0.0)
        state = CompartmentState(s=6000, e=100, i_a=200, i_s=100, i_t=100)
        rng = trajectory_rng(5)
        for _ in range(30):
            state, flows = step(state, params, 0, rng)
            assert flows.n_se == 0

    def test_flows_reconcile_with_states(self, rng):
        params = ModelParams()
        state = default_init(params)
        for day in range(60):
            new, f = step(state, params, day, rng)
            assert new.s == state.s - f.n_se - f.n_ssq + f.n_sqs
            assert new.s_q == state.s_q - f.n_sqs + f.n_ssq
            assert new.e == state.e + f.n_se - f.n_eia - f.n_eis - f.n_eqq
            assert new.i_a == state.i_a + f.n_eia - f.n_iait - f.n_iaqq - f.n_iaru
            assert new.i_s == state.i_s + f.n_eis - f.n_isit - f.n_isru
            assert new.i_t == state.i_t + f.n_iait + f.n_isit + f.n_qqit - f.n_itqi
            assert new.q_i == state.q_i + f.n_itqi - f.n_qird
            assert new.q_q == state.q_q + f.n_eqq + f.n_iaqq + f.n_ruqq - f.n_qqit - f.n_qqru
            assert new.r_d == state.r_d + f.n_qird
            assert new.r_u == state.r_u + f.n_iaru + f.n_isru + f.n_qqru - f.n_ruqq
            state = new

    def test_conservation_under_random_parameters(self):
        rng = trajectory_rng(99)
        gen = np.random.default_rng(4)
        for _ in range(300):
            params = _random_params(gen)
            state = _random_state(gen, params.n_total)
            new, _ = step(state, params, 0, rng)
            assert new.total == params.n_total
            assert new.q_q_ledger.total == new.q_q

    def test_nonnegativity_under_adversarial_rates(self):
        # all rates at 1: every exit fires at once and must still partition
        params = ModelParams(
            beta=1.0, alpha=1.0, mu=1.0, gamma=1.0, sigma=1.0, tau_f=1.0,
            tau_s=1.0, tau_r=1.0, r_i=1.0, r_q=1.0, n_cc=20, i_out=0,
            n_total=600, break_return_day=0,
        )
        rng = trajectory_rng(123)
        state = CompartmentState(
            s=100, s_q=50, e=100, i_a=100, i_s=50, i_t=50, q_i=50,
            q_q=60, q_q_ledger=QuarantineLedger(20, 20, 20), r_d=20, r_u=20,
        )
        for _ in range(50):
            state, _ = step(state, params, 0, rng)
            assert state.total == params.n_total
            assert min(
                state.s, state.s_q, state.e, state.i_a, state.i_s,
                state.i_t, state.q_i, state.q_q, state.r_d, state.r_u,
            ) >= 0


class TestBreakInjection:
    def test_zero_injection_is_identity(self):
        params = ModelParams(i_out=0)
        state = CompartmentState(s=100, e=5)
        assert apply_break_injection(state, params) == state

    def test_clamps_to_available_susceptibles(self):
        params = ModelParams(i_out=100, n_total=6500)
        state = CompartmentState(s=50, r_u=6450)
        new = apply_break_injection(state, params)
        assert new.s == 0 and new.e == 50

    def test_moves_exact_count(self):
        params = ModelParams(i_out=100)
        state = CompartmentState(s=5000, r_u=1500)
        new = apply_break_injection(state, params)
        assert new.e == 100 and new.s == 4900
        assert new.total == state.total


class TestSimulate:
    def test_rejects_zero_horizon(self):
        params = ModelParams()
        with pytest.raises(ValueError):
            simulate(params, default_init(params), 0, seed=1)

    def test_single_day_has_one_flow_record(self):
        params = ModelParams()
        t = simulate(params, default_init(params), 1, seed=1)
        assert t.flows.shape == (1, len(FLOW_NAMES))
        assert t.states.shape == (2, len(STATE_COLUMNS))

    def test_deterministic_given_seed_and_index(self):
        params = ModelParams()
        a = simulate(params, default_init(params), 112, seed=11, stream_index=3)
        b = simulate(params, default_init(params), 112, seed=11, stream_index=3)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.flows, b.flows)
        c = simulate(params, default_init(params), 112, seed=11, stream_index=4)
        assert not np.array_equal(a.flows, c.flows)

    def test_no_seeds_no_break_no_cases(self):
        params = ModelParams(i_out=0)
        init = CompartmentState(s=params.n_total)
        t = simulate(params, init, 112, seed=2)
        assert t.flows.sum() == 0
        assert (t.states[:, 0] == params.n_total).all()

    def test_break_injection_applied_on_schedule(self):
        params = ModelParams(beta=0.0, i_out=100, break_return_day=10)
        init = CompartmentState(s=params.n_total)
        t = simulate(params, init, 20, seed=3)
        assert t.injected == 100
        assert t.states[10, 2] == 0        # e before the break day step
        assert t.states[11, 2] > 0         # injected exposures progressing

    def test_monotone_detected_recoveries(self):
        params = ModelParams()
        t = simulate(params, default_init(params), 112, seed=8)
        r_d = t.states[:, STATE_COLUMNS.index("r_d")]
        assert (np.diff(r_d) >= 0).all()

    def test_conservation_along_trajectory(self):
        params = ModelParams()
        t = simulate(params, default_init(params), 112, seed=9)
        assert (t.states[:, :10].sum(axis=1) == params.n_total).all()
        assert (t.states >= 0).all()

    def test_trajectory_accessors(self):
        params = ModelParams()
        t = simulate(params, default_init(params), 5, seed=4)
        assert t.state_at(0) == default_init(params)
        assert t.flows_at(0).as_vector().tolist() == t.flows[0].tolist()


class TestRngStream:
    def test_same_key_same_stream(self):
        a = trajectory_rng(42, 7).integers(0, 2**63, 10)
        b = trajectory_rng(42, 7).integers(0, 2**63, 10)
        assert np.array_equal(a, b)

    def test_different_index_different_stream(self):
        a = trajectory_rng(42, 7).integers(0, 2**63, 10)
        b = trajectory_rng(42, 8).integers(0, 2**63, 10)
        assert not np.array_equal(a, b)


class TestMeanField:
    def test_large_population_tracks_expectation_iteration(self):
        # deterministic oracle: same difference equations, expected values.
        # Part of the population starts recovered so the epidemic is smooth
        # and the close-contact pool never clamps; a single trajectory then
        # tracks the expectation to well under 2% in global sup-norm.
        n = 1_000_000
        params = ModelParams(alpha=0.3, beta=0.4, n_total=n, i_out=100)
        init = CompartmentState(s=n - 10_000 - 300_000, e=10_000, r_u=300_000)
        t = simulate(params, init, 100, seed=1)
        expected = meanfield_trajectory(params, init.as_vector(), 100)
        diff = np.abs(t.states[:, :10] - expected[:, :10]).max()
        assert diff / expected[:, :10].max() < 0.02


def _random_params(gen):
    return ModelParams(
        beta=float(gen.uniform(0, 1)),
        alpha=float(gen.uniform(0, 1)),
        mu=float(gen.uniform(0, 1)),
        gamma=float(gen.uniform(0, 1)),
        sigma=float(gen.uniform(0, 1)),
        tau_f=float(gen.uniform(0, 1)),
        tau_s=float(gen.uniform(0, 1)),
        tau_r=float(gen.uniform(0, 1)),
        r_i=float(gen.uniform(0, 1)),
        r_q=float(gen.uniform(0, 1)),
        n_cc=int(gen.integers(0, 21)),
        i_out=0,
        n_total=2000,
        break_return_day=0,
    )


def _random_state(gen, n_total):
    cuts = np.sort(gen.integers(0, n_total + 1, size=11))
    counts = np.diff(np.concatenate([[0], cuts, [n_total]]))
    qq_parts = counts[7:10]
    return CompartmentState(
        s=int(counts[0]), s_q=int(counts[1]), e=int(counts[2]),
        i_a=int(counts[3]), i_s=int(counts[4]), i_t=int(counts[5]),
        q_i=int(counts[6]),
        q_q=int(qq_parts.sum()),
        q_q_ledger=QuarantineLedger(*(int(v) for v in qq_parts)),
        r_d=int(counts[10]), r_u=int(counts[11]),
    )
