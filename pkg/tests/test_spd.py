"""Affine-invariant geometry: closed-form cases and metric identities."""

import numpy as np
import pytest

from rmra.errors import NumericalError, ValidationError
from rmra.linalg import SpdMatrix, SymmetricMatrix, symmetrize
from rmra.spd import (
    exp_map,
    frechet_midpoint,
    geodesic,
    log_map,
    riemannian_distance,
)


def rand_spd(n, rng, lo=1e-2, hi=1.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    return SpdMatrix(symmetrize((q * lam) @ q.T))


class TestGeodesic:
    def test_point_to_itself(self):
        w = rand_spd(6, np.random.default_rng(0))
        for p in (0.0, 0.3, 1.0):
            np.testing.assert_allclose(geodesic(w, w, p).a, w.a, atol=1e-12)

    def test_endpoints(self):
        rng = np.random.default_rng(1)
        w1, w2 = rand_spd(5, rng), rand_spd(5, rng)
        assert np.linalg.norm(geodesic(w1, w2, 0.0).a - w1.a) <= 1e-12
        assert np.linalg.norm(geodesic(w1, w2, 1.0).a - w2.a) <= 1e-10

    def test_commuting_case_elementwise(self):
        # commuting diagonals: a^{1-p} b^p elementwise
        w1 = SpdMatrix(np.diag([1.0, 4.0]))
        w2 = SpdMatrix(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(geodesic(w1, w2, 0.5).a, np.diag([2.0, 2.0]),
                                   atol=1e-12)
        np.testing.assert_allclose(geodesic(w1, w2, 0.25).a,
                                   np.diag([4.0**0.25, 4.0**0.75]), atol=1e-12)

    def test_parameter_composition(self):
        rng = np.random.default_rng(2)
        w1, w2 = rand_spd(8, rng), rand_spd(8, rng)
        for p in (0.2, 0.5, 0.9):
            d = geodesic(w1, w2, p).a - geodesic(w2, w1, 1.0 - p).a
            assert np.linalg.norm(d) <= 1e-9

    def test_midpoint_symmetry(self):
        rng = np.random.default_rng(3)
        w1, w2 = rand_spd(10, rng), rand_spd(10, rng)
        m = frechet_midpoint(w1, w2).a
        err = np.linalg.norm(m @ np.linalg.inv(w1.a) @ m - w2.a)
        assert err <= 1e-8

    def test_rejects_bad_parameter(self):
        w = rand_spd(3, np.random.default_rng(4))
        with pytest.raises(ValidationError):
            geodesic(w, w, 1.5)
        with pytest.raises(ValidationError):
            geodesic(w, w, -0.1)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            geodesic(SpdMatrix(np.eye(2)), SpdMatrix(np.eye(3)), 0.5)

    def test_conditioning_guard(self):
        w1 = SpdMatrix(np.diag([1.0, 1e-13]), min_eig_tol=0.0)
        w2 = SpdMatrix(np.eye(2))
        with pytest.raises(NumericalError, match="ill-conditioned"):
            geodesic(w1, w2, 0.5)


class TestDistance:
    def test_zero_at_same_point(self):
        w = rand_spd(7, np.random.default_rng(5))
        assert riemannian_distance(w, w) <= 1e-12

    def test_hand_value(self):
        # log eigenvalues of diag(e^2, 1) are (2, 0): distance 2
        w1 = SpdMatrix(np.eye(2))
        w2 = SpdMatrix(np.diag([np.e**2, 1.0]))
        assert riemannian_distance(w1, w2) == pytest.approx(2.0, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            w1, w2 = rand_spd(6, rng), rand_spd(6, rng)
            d12 = riemannian_distance(w1, w2)
            d21 = riemannian_distance(w2, w1)
            assert abs(d12 - d21) <= 1e-10

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        for n in (5, 12, 20):
            w1, w2 = rand_spd(n, rng), rand_spd(n, rng)
            # random congruence with condition number <= 10
            q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
            q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
            a = q1 @ np.diag(np.exp(rng.uniform(0, np.log(10.0), n))) @ q2
            t1 = SpdMatrix(symmetrize(a @ w1.a @ a.T))
            t2 = SpdMatrix(symmetrize(a @ w2.a @ a.T))
            d0 = riemannian_distance(w1, w2)
            d1 = riemannian_distance(t1, t2)
            assert abs(d0 - d1) <= 1e-8


class TestExpLogMaps:
    def test_exp_of_zero(self):
        w = rand_spd(5, np.random.default_rng(8))
        zero = SymmetricMatrix(np.zeros((5, 5)))
        np.testing.assert_allclose(exp_map(w, zero).a, w.a, atol=1e-12)

    def test_exp_at_identity_is_expm(self):
        rng = np.random.default_rng(9)
        d = symmetrize(rng.standard_normal((6, 6)))
        from rmra.linalg import expm

        np.testing.assert_allclose(exp_map(SpdMatrix(np.eye(6)), d).a,
                                   expm(d).a, atol=1e-12)

    def test_scalar_case(self):
        # 1x1: 4 * exp(ln 2) = 8
        w = SpdMatrix(np.array([[4.0]]))
        d = SymmetricMatrix(np.array([[4.0 * np.log(2.0)]]))
        assert exp_map(w, d).a[0, 0] == pytest.approx(8.0, abs=1e-12)

    def test_log_at_same_point(self):
        w = rand_spd(4, np.random.default_rng(10))
        assert np.linalg.norm(log_map(w, w).a) <= 1e-12

    def test_log_at_identity_is_logm(self):
        from rmra.linalg import logm

        v = rand_spd(5, np.random.default_rng(11))
        np.testing.assert_allclose(log_map(SpdMatrix(np.eye(5)), v).a,
                                   logm(v).a, atol=1e-12)

    @pytest.mark.parametrize("n", [4, 15, 30])
    def test_round_trip(self, n):
        rng = np.random.default_rng(n)
        w, v = rand_spd(n, rng), rand_spd(n, rng)
        back = exp_map(w, log_map(w, v))
        assert np.linalg.norm(back.a - v.a) <= 1e-9 * max(1.0, np.linalg.norm(v.a))

    def test_log_domain_error(self):
        w = rand_spd(3, np.random.default_rng(12))
        # a target wrapped with a loosened floor still trips the log domain
        v = SpdMatrix(np.diag([1.0, 1.0, -2.0]), min_eig_tol=-3.0)
        with pytest.raises(NumericalError, match="not positive"):
            log_map(w, v)
