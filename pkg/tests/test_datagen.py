"""Synthetic generators: printed toy matrices, the gyre field and
integrator, and the tori embeddings."""

import numpy as np
import pytest

from rmra.datagen import (
    GyreConfig,
    TorusConfig,
    double_gyre,
    gyre_velocity,
    toy_spd_pair,
    toy_spsd_pair,
    tori,
    transition_weight,
)
from rmra.errors import ValidationError
from rmra.linalg import sym_eig


class TestToyPairs:
    def test_psi_orthonormal(self):
        pair = toy_spd_pair()
        err = np.max(np.abs(pair.psi.T @ pair.psi - np.eye(4)))
        assert err <= 1e-15

    def test_m1_corner_entry(self):
        # expand Psi Lambda Psi^T by hand: (0.5 + 1 + 0.01 + 0.2) / 4
        pair = toy_spd_pair()
        assert pair.m1.a[0, 0] == pytest.approx(0.4275, abs=1e-15)

    def test_spd_pair_spectra_exact(self):
        pair = toy_spd_pair()
        np.testing.assert_allclose(np.sort(sym_eig(pair.m1).values),
                                   np.sort(pair.lambda1), atol=1e-14)
        np.testing.assert_allclose(np.sort(sym_eig(pair.m2).values),
                                   np.sort(pair.lambda2), atol=1e-14)

    def test_spsd_pair_is_rank_three(self):
        pair = toy_spsd_pair()
        values = np.sort(np.abs(sym_eig(pair.m1).values))
        assert values[0] <= 1e-14
        assert values[1] > 1e-3

    def test_spsd_annihilates_psi4(self):
        pair = toy_spsd_pair()
        assert np.linalg.norm(pair.m1.a @ pair.psi[:, 3]) <= 1e-14

    def test_spsd_differs_by_psi4_dyad(self):
        spd, spsd = toy_spd_pair(), toy_spsd_pair()
        dyad = 0.2 * np.outer(spd.psi[:, 3], spd.psi[:, 3])
        np.testing.assert_allclose(spd.m1.a - spsd.m1.a, dyad, atol=1e-14)


class TestGyreField:
    def test_transition_weight_values(self):
        assert transition_weight(0.0) == 0.0
        assert transition_weight(1.0) == 1.0
        assert transition_weight(0.5) == pytest.approx(0.5)

    def test_velocity_at_quarter_point_start(self):
        vx, vy = gyre_velocity(0.25, 0.0, 0.0)
        assert vx == pytest.approx(-2.0 * np.pi, abs=1e-12)
        assert vy == pytest.approx(0.0, abs=1e-12)

    def test_velocity_at_center_end(self):
        vx, vy = gyre_velocity(0.5, 0.5, 1.0)
        assert vx == pytest.approx(20.0 * np.pi, abs=1e-10)
        assert vy == pytest.approx(0.0, abs=1e-10)

    def test_field_is_divergence_free_numerically(self):
        # Hamiltonian flow: dvx/dx + dvy/dy = 0
        h = 1e-6
        for (x, y, t) in ((0.3, 0.7, 0.2), (0.8, 0.1, 0.9)):
            dvx = (gyre_velocity(x + h, y, t)[0] - gyre_velocity(x - h, y, t)[0]) / (2 * h)
            dvy = (gyre_velocity(x, y + h, t)[1] - gyre_velocity(x, y - h, t)[1]) / (2 * h)
            assert abs(dvx + dvy) <= 1e-4


class TestGyreIntegration:
    def test_shapes_and_initial_frame(self):
        cfg = GyreConfig(n=50, t=16, seed=3)
        traj = double_gyre(cfg)
        assert traj.frames.shape == (16, 50, 2)
        rng = np.random.Generator(np.random.PCG64(3))
        np.testing.assert_array_equal(traj.frames[0], rng.uniform(0, 1, (50, 2)))

    def test_deterministic(self):
        cfg = GyreConfig(n=20, t=8, seed=11)
        a = double_gyre(cfg).frames
        b = double_gyre(cfg).frames
        assert a.tobytes() == b.tobytes()

    def test_rk4_order(self):
        # richardson check against a dt/8 reference: halving dt should cut
        # the error by ~2^4
        base = GyreConfig(n=12, t=9, dt=1.0 / 64.0, seed=5)
        fine = GyreConfig(n=12, t=65, dt=1.0 / 512.0, seed=5)
        half = GyreConfig(n=12, t=17, dt=1.0 / 128.0, seed=5)
        ref = double_gyre(fine).frames[-1]
        err_base = np.max(np.abs(double_gyre(base).frames[-1] - ref))
        err_half = np.max(np.abs(double_gyre(half).frames[-1] - ref))
        ratio = err_base / err_half
        assert 8.0 <= ratio <= 32.0  # 16 +- factor 2

    def test_euler_available_and_less_accurate(self):
        ref = double_gyre(GyreConfig(n=10, t=33, dt=1.0 / 256.0, seed=7)).frames[-1]
        rk = double_gyre(GyreConfig(n=10, t=5, dt=1.0 / 32.0, seed=7)).frames[-1]
        eu = double_gyre(GyreConfig(n=10, t=5, dt=1.0 / 32.0, seed=7,
                                    integrator="euler")).frames[-1]
        assert np.max(np.abs(eu - ref)) > np.max(np.abs(rk - ref))

    def test_frozen_field_conserves_stream_function(self):
        # autonomous check: with the blend frozen at 0 the c1 stream function
        # is a conserved quantity up to the integrator's O(dt^4) error
        from rmra.datagen import _velocity_state

        rng = np.random.default_rng(9)
        state = rng.uniform(0.2, 0.8, (30, 2))
        c1 = 2.0

        def h1(s):
            return c1 * np.sin(2 * np.pi * s[:, 0]) * np.sin(np.pi * s[:, 1])

        h0 = h1(state)

        def drift_after_unit_time(dt, start):
            s = start.copy()
            for _ in range(int(round(1.0 / dt))):
                k1 = _velocity_state(s, 0.0, c1, 0.0)
                k2 = _velocity_state(s + 0.5 * dt * k1, 0.0, c1, 0.0)
                k3 = _velocity_state(s + 0.5 * dt * k2, 0.0, c1, 0.0)
                k4 = _velocity_state(s + dt * k3, 0.0, c1, 0.0)
                s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            return np.max(np.abs(h1(s) - h0))

        coarse = drift_after_unit_time(1.0 / 128.0, state)
        fine = drift_after_unit_time(1.0 / 256.0, state)
        assert fine <= 1e-4
        # fourth-order decay of the conservation error per unit time
        assert 8.0 <= coarse / fine <= 32.0

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            GyreConfig(n=0)
        with pytest.raises(ValidationError):
            GyreConfig(integrator="leapfrog")


class TestTori:
    def test_origin_angles_give_printed_point(self):
        cfg = TorusConfig(n=4, seed=0)
        sample = tori(cfg)
        # recompute with zero angles through the same embedding
        from rmra.datagen import _torus_embed

        zero = np.zeros(1)
        x1 = _torus_embed(zero, zero, zero, cfg.r, cfg.big_r, cfg.tilde_r)
        np.testing.assert_allclose(x1[0], [24.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_last_coordinate_bounded_by_small_radius(self):
        sample = tori(TorusConfig(n=500, seed=1))
        assert np.max(sample.x1.points[:, 3] ** 2) <= 4.0 + 1e-12
        assert np.max(sample.x2.points[:, 3] ** 2) <= 4.0 + 1e-12

    def test_common_variant_shares_azimuth(self):
        sample = tori(TorusConfig(n=200, seed=2, variant="common"))
        # same azimuth angle: the xy-plane polar angles of paired points agree
        phi1 = np.arctan2(sample.x1.points[:, 1], sample.x1.points[:, 0])
        phi2 = np.arctan2(sample.x2.points[:, 1], sample.x2.points[:, 0])
        np.testing.assert_allclose(phi1, phi2, atol=1e-12)

    def test_unique_variant_draws_fourth_angle(self):
        sample = tori(TorusConfig(n=200, seed=3, variant="unique"))
        assert sample.theta.shape == (200, 4)
        phi1 = np.arctan2(sample.x1.points[:, 1], sample.x1.points[:, 0])
        phi2 = np.arctan2(sample.x2.points[:, 1], sample.x2.points[:, 0])
        assert np.max(np.abs(phi1 - phi2)) > 0.5

    def test_swapped_roles_between_views(self):
        sample = tori(TorusConfig(n=300, seed=4))
        th = sample.theta
        np.testing.assert_allclose(sample.x1.points[:, 3],
                                   2.0 * np.sin(th[:, 1]), atol=1e-12)
        np.testing.assert_allclose(sample.x2.points[:, 3],
                                   2.0 * np.sin(th[:, 0]), atol=1e-12)

    def test_deterministic(self):
        a = tori(TorusConfig(n=50, seed=5)).x1.points
        b = tori(TorusConfig(n=50, seed=5)).x1.points
        assert a.tobytes() == b.tobytes()

    def test_radii_validation(self):
        with pytest.raises(ValidationError):
            TorusConfig(r=8.0, big_r=7.0)
