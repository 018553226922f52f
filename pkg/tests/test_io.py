import json

import numpy as np
import pytest

from campusepi.abc import AcceptanceSurface, CredibleIntervals, PosteriorSample
from campusepi.config import config_to_dict, load_config
from campusepi.dataio import (
    ParseError,
    parse_observed_csv,
    read_band_csv,
    read_curves_csv,
    read_intervals_json,
    read_posterior_csv,
    read_surface_csv,
    read_trajectory_csv,
    write_band_csv,
    write_curves_csv,
    write_intervals_json,
    write_manifest,
    write_posterior_csv,
    write_surface_csv,
    write_trajectory_csv,
    write_weekly_csv,
)
from campusepi.ensemble import CurveMatrix, functional_band
from campusepi.model import CompartmentState, ModelParams, simulate


class TestObservedCsv:
    def write(self, tmp_path, text):
        path = tmp_path / "observed.csv"
        path.write_text(text)
        return path

    def test_parses_valid_series(self, tmp_path):
        series = parse_observed_csv(self.write(tmp_path, "week,cases\n1,5\n2,12\n"))
        assert series.cases == (5, 12)
        assert series.weeks == (1, 2)

    def test_gap_names_missing_week(self, tmp_path):
        with pytest.raises(ParseError, match="expected week 2"):
            parse_observed_csv(self.write(tmp_path, "week,cases\n1,5\n3,12\n"))

    def test_negative_count_rejected(self, tmp_path):
        with pytest.raises(ParseError, match="negative"):
            parse_observed_csv(self.write(tmp_path, "week,cases\n1,-3\n"))

    def test_non_integer_rejected_with_line_number(self, tmp_path):
        with pytest.raises(ParseError, match=":3:"):
            parse_observed_csv(self.write(tmp_path, "week,cases\n1,5\n2,many\n"))

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(ParseError, match="empty"):
            parse_observed_csv(self.write(tmp_path, ""))

    def test_header_required(self, tmp_path):
        with pytest.raises(ParseError, match="header"):
            parse_observed_csv(self.write(tmp_path, "1,5\n2,12\n"))

    def test_weekly_round_trip(self, tmp_path):
        path = tmp_path / "weekly.csv"
        write_weekly_csv(np.array([0, 5, 30, 2]), path)
        series = parse_observed_csv(path)
        assert series.cases == (0, 5, 30, 2)

    def test_bundled_observed_series_parses(self):
        from importlib import resources
        path = resources.files("campusepi").joinpath("data/observed_weekly.csv")
        series = parse_observed_csv(path)
        assert len(series.cases) == 16


class TestConfig:
    def test_empty_config_gives_calibrated_defaults(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("")
        config = load_config(path)
        p = config.params
        assert p.mu == pytest.approx(1 / 3)
        assert p.gamma == pytest.approx(1 / 14)
        assert p.tau_s == pytest.approx(1 / 2)
        assert p.tau_r == pytest.approx(1 / 2)
        assert p.r_i == pytest.approx(1 / 10)
        assert p.r_q == pytest.approx(1 / 14)
        assert p.n_cc == 10
        assert config.grid.alpha.points == 21
        assert config.grid.beta.points == 21
        assert config.grid.i_out.points == 21
        assert config.thresholds.week_tolerance == 1
        assert config.thresholds.height_tolerance == 10
        assert config.thresholds.peak_floor == 20

    def test_no_path_gives_defaults(self):
        config = load_config(None)
        assert config.horizon == 112
        assert config.params.break_return_day == 77

    def test_out_of_range_value_rejected(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[params]\nalpha = 1.5\n")
        with pytest.raises(ValueError, match="alpha"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[params]\nbeta_typo = 0.3\n")
        with pytest.raises(ValueError, match="beta_typo"):
            load_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[paramz]\nbeta = 0.3\n")
        with pytest.raises(ValueError, match="paramz"):
            load_config(path)

    def test_init_section_builds_state(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[params]\nn_total = 100\n[init]\ne = 5\nq_q_exposed = 2\n")
        config = load_config(path)
        init = config.initial_state()
        assert init.e == 5 and init.q_q == 2 and init.s == 93
        assert init.total == 100

    def test_init_overflow_rejected(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[params]\nn_total = 10\n[init]\ne = 50\n")
        with pytest.raises(ValueError):
            load_config(path)

    def test_shared_grid_points(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[grid]\npoints = 5\n[grid.beta]\nlow = 0.3\nhigh = 0.9\n")
        config = load_config(path)
        assert config.grid.alpha.points == 5
        assert config.grid.beta.points == 5
        assert config.grid.beta.low == 0.3

    def test_config_dict_is_json_ready(self, tmp_path):
        config = load_config(None)
        json.dumps(config_to_dict(config))


class TestArtifactRoundTrips:
    def test_trajectory_csv(self, tmp_path):
        params = ModelParams()
        init = CompartmentState(s=params.n_total - 10, e=10)
        t = simulate(params, init, 30, seed=5)
        path = tmp_path / "trajectory.csv"
        write_trajectory_csv(t, path)
        states, flows = read_trajectory_csv(path)
        assert np.array_equal(states, t.states[:, :10])
        assert np.array_equal(flows, t.flows)
        header = path.read_text().splitlines()[0]
        assert header.startswith("day,S,S_q,E,I_A,I_S,I_T,Q_i,Q_q,R_D,R_U,n_SE,")

    def test_posterior_csv(self, tmp_path):
        posterior = PosteriorSample(
            grid=np.array([[0.1, 0.28, 100.0], [0.5, 0.44, 140.0]]),
            accepted=np.array([3, 2]),
            attempted=np.array([10, 10]),
        )
        path = tmp_path / "posterior_draws.csv"
        write_posterior_csv(posterior, path)
        loaded = read_posterior_csv(path)
        assert loaded.total_accepted == 5
        assert np.array_equal(
            np.sort(loaded.draws, axis=0), np.sort(posterior.draws, axis=0)
        )

    def test_surface_csv(self, tmp_path):
        surface = AcceptanceSurface(
            grid=np.array([[0.1, 0.28, 100.0], [0.5, 0.44, 140.0]]),
            accepted=np.array([3, 0]),
            attempted=np.array([10, 10]),
        )
        path = tmp_path / "acceptance_surface.csv"
        write_surface_csv(surface, path)
        loaded = read_surface_csv(path)
        assert np.array_equal(loaded.grid, surface.grid)
        assert np.array_equal(loaded.accepted, surface.accepted)
        assert np.array_equal(loaded.attempted, surface.attempted)

    def test_intervals_json(self, tmp_path):
        intervals = CredibleIntervals(alpha=(0.0, 0.95), beta=(0.28, 0.4), i_out=(65.0, 140.0))
        path = tmp_path / "intervals.json"
        write_intervals_json(intervals, path)
        assert read_intervals_json(path) == intervals

    def test_band_csv(self, tmp_path):
        gen = np.random.default_rng(1)
        curves = gen.integers(0, 50, size=(12, 8))
        band = functional_band(curves)
        path = tmp_path / "band.csv"
        write_band_csv(band, path)
        loaded = read_band_csv(path)
        assert loaded["median"] == pytest.approx(band.median)
        assert loaded["fence_lo"] == pytest.approx(band.fence_low)
        assert loaded["fence_hi"] == pytest.approx(band.fence_high)

    def test_curves_csv(self, tmp_path):
        gen = np.random.default_rng(2)
        matrix = CurveMatrix(curves=gen.integers(0, 50, size=(5, 16)), draws=np.zeros((5, 3)))
        path = tmp_path / "curves.csv"
        write_curves_csv(matrix, path)
        assert np.array_equal(read_curves_csv(path), matrix.curves)

    def test_manifest_contents(self, tmp_path):
        write_manifest(tmp_path, "simulate", 7, {"params": {"beta": 0.4}})
        payload = json.loads((tmp_path / "manifest.json").read_text())
        assert payload["command"] == "simulate"
        assert payload["seed"] == 7
        assert payload["config"]["params"]["beta"] == 0.4
        assert "version" in payload
