import math

import numpy as np
import pytest

from dccat import derive, reference_params
from dccat.classical import ClassicalState, IntegratorConfig, Trajectory, integrate
from dccat.core import TWO_PI
from dccat.locking import (
    ArnoldGrid,
    boundary_match_fraction,
    classify_lock,
    predicted_boundaries,
    sweep_tongue,
)
from dccat.noise import NoiseModel


@pytest.fixture(scope="module")
def rc_params():
    return reference_params(R0=100.0, C0=15.9e-12)


class TestClassifyLock:
    def test_zero_detuning_locked(self, rc_params):
        p = rc_params.replace(eps_L=0.1)
        traj = integrate(
            ClassicalState(phi_J_hat=math.pi), 0.4e-6, p,
            config=IntegratorConfig(out_dt=2e-10),
        )
        v = classify_lock(traj, 0.4e-6)
        assert v["locked"]
        assert abs(v["psi_dot"]) < TWO_PI * 0.1e6

    def test_free_drift_unlocked(self, rc_params):
        delta = TWO_PI * 5e6
        traj = integrate(
            ClassicalState(), 0.4e-6, rc_params,
            NoiseModel("constant_offset", offset=delta),
            IntegratorConfig(out_dt=2e-10),
        )
        v = classify_lock(traj, 0.4e-6)
        assert not v["locked"]
        assert v["psi_dot"] == pytest.approx(delta, rel=0.05)

    def test_synthetic_oscillation_locked(self, rc_params):
        t = np.linspace(0.0, 0.4e-6, 2001)
        data = np.zeros((len(t), 6))
        data[:, 5] = 0.01 * np.sin(TWO_PI * 50e6 * t)
        traj = Trajectory(t, data, rc_params)
        v = classify_lock(traj, 0.4e-6, threshold=TWO_PI * 0.5e6)
        assert v["locked"]

    def test_window_validation(self, rc_params):
        t = np.arange(0.0, 0.4e-6, 2e-10)
        traj = Trajectory(t, np.zeros((len(t), 6)), rc_params)
        with pytest.raises(ValueError, match="t_f / 4"):
            classify_lock(traj, 0.4e-6, window=0.2e-6)
        with pytest.raises(ValueError, match="span"):
            classify_lock(traj, 0.8e-6)


@pytest.fixture(scope="module")
def small_grid(rc_params):
    deltas = TWO_PI * np.linspace(-15e6, 15e6, 13)
    eps_L = np.linspace(0.0, 0.2, 6)
    return sweep_tongue(rc_params, deltas, eps_L, eps_d=0.0, processes=2)


class TestSweep:
    def test_bare_boundary_within_one_cell(self, small_grid):
        assert boundary_match_fraction(small_grid, "bare") >= 0.9

    def test_symmetric_under_detuning_flip(self, small_grid):
        g = small_grid
        assert len(g.delta_omega) % 2 == 1
        flipped = g.locked[:, ::-1]
        # at most one boundary cell per row may differ
        assert (g.locked != flipped).sum(axis=1).max() <= 2

    def test_monotone_in_eps_L(self, small_grid):
        g = small_grid
        for j in range(len(g.delta_omega)):
            col = g.locked[:, j]
            # once locked at some eps_L, stays locked for larger eps_L
            first = np.argmax(col) if col.any() else len(col)
            assert np.all(col[first:]) or not col.any()

    def test_order_independent(self, rc_params, small_grid):
        deltas = TWO_PI * np.linspace(-15e6, 15e6, 13)
        eps_L = np.linspace(0.0, 0.2, 6)
        serial = sweep_tongue(rc_params, deltas, eps_L, eps_d=0.0, processes=1)
        np.testing.assert_array_equal(serial.psi_dot, small_grid.psi_dot)
        np.testing.assert_array_equal(serial.locked, small_grid.locked)

    def test_diverged_cells_flagged(self, rc_params):
        dp = derive(rc_params)
        eps_d = 4.0 * abs(dp.g2)
        cfg = IntegratorConfig(out_dt=2e-10, guard=0.5)
        grid = sweep_tongue(
            rc_params,
            TWO_PI * np.array([0.0]),
            np.array([0.1]),
            eps_d=eps_d,
            t_f=0.1e-6,
            window=0.025e-6,
            config=cfg,
            processes=1,
        )
        assert grid.diverged.all()
        assert not grid.locked.any()
        assert np.isnan(grid.psi_dot).all()

    def test_csv_and_metadata(self, small_grid, tmp_path):
        f = tmp_path / "grid.csv"
        small_grid.to_csv(f)
        rows = f.read_text().splitlines()
        assert rows[0] == "delta_omega,eps_L,psi_dot,locked,diverged"
        assert len(rows) == 1 + small_grid.locked.size
        j = tmp_path / "grid.json"
        small_grid.to_json(j)
        import json

        meta = json.loads(j.read_text())
        assert meta["schema_version"] == 1
        assert len(meta["boundaries"]["bare_half_width"]) == len(small_grid.eps_L)
        assert "runtime_s" in meta


class TestPredictedBoundaries:
    def test_bare_values(self, rc_params):
        b = predicted_boundaries(rc_params, [0.0, 0.1, 0.2], 0.0)
        dp = derive(rc_params)
        assert b["bare_half_width"][1] == pytest.approx(0.05 * dp.nu_0)
        assert b["bare_half_width"][1] / TWO_PI == pytest.approx(11.2e6, rel=5e-3)
        assert b["correction_factor"] == 1.0

    def test_corrected_factor_six_photons(self, rc_params):
        dp = derive(rc_params)
        eps_d = 6.0 * abs(dp.g2)
        b = predicted_boundaries(rc_params, [0.1], eps_d)
        want = abs(1.0 - rc_params.phi_zpf_a**2 * 6.0)
        assert b["correction_factor"] == pytest.approx(want, rel=1e-9)
        assert b["corrected_half_width"][0] / TWO_PI == pytest.approx(
            11.2e6 * 0.654, rel=2e-2
        )

    def test_grid_shape_validation(self):
        with pytest.raises(ValueError, match="shape"):
            ArnoldGrid(
                delta_omega=np.arange(3.0),
                eps_L=np.arange(2.0),
                eps_d=0.0j,
                psi_dot=np.zeros((3, 2)),
                locked=np.zeros((3, 2), dtype=bool),
                diverged=np.zeros((3, 2), dtype=bool),
                boundaries={},
            )
