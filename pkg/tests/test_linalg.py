"""Core spectral primitives against hand-computed and algebraic oracles."""

import numpy as np
import pytest

from rmra.errors import NumericalError, ValidationError
from rmra.linalg import (
    EigenSystem,
    SpdMatrix,
    SymmetricMatrix,
    expm,
    invsqrtm,
    logm,
    powm,
    sqrtm,
    sym_eig,
    symmetrize,
)


def rand_spd(n, rng, lo=1e-2, hi=1.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    return SpdMatrix(symmetrize((q * lam) @ q.T))


class TestSymEig:
    def test_identity(self):
        eig = sym_eig(np.eye(3))
        np.testing.assert_allclose(eig.values, np.ones(3))
        np.testing.assert_allclose(eig.vectors.T @ eig.vectors, np.eye(3), atol=1e-12)

    def test_diagonal_permutation(self):
        eig = sym_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(eig.values, [3.0, 2.0, 1.0])
        # columns must be the standard basis vectors for 3, 2, 1
        expected = np.eye(3)[:, [0, 2, 1]]
        np.testing.assert_allclose(np.abs(eig.vectors), expected, atol=1e-14)

    def test_two_by_two_hand_case(self):
        # [[2,1],[1,2]]: eigenvalues 2 +- 1 on (1,1)/sqrt2 and (1,-1)/sqrt2
        eig = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(eig.values, [3.0, 1.0], atol=1e-14)
        v0 = np.full(2, 1 / np.sqrt(2))
        v1 = np.array([1 / np.sqrt(2), -1 / np.sqrt(2)])
        assert min(np.linalg.norm(eig.vectors[:, 0] - v0),
                   np.linalg.norm(eig.vectors[:, 0] + v0)) < 1e-14
        assert min(np.linalg.norm(eig.vectors[:, 1] - v1),
                   np.linalg.norm(eig.vectors[:, 1] + v1)) < 1e-14

    @pytest.mark.parametrize("n", [5, 20, 50])
    def test_type_invariants(self, n):
        rng = np.random.default_rng(n)
        m = symmetrize(rng.standard_normal((n, n)))
        eig = sym_eig(m)
        gram = eig.vectors.T @ eig.vectors
        assert np.max(np.abs(gram - np.eye(n))) <= 1e-10
        err = np.linalg.norm(eig.reconstruct() - m.a)
        assert err <= 1e-9 * np.linalg.norm(m.a)
        assert np.all(np.diff(eig.values) <= 0)

    def test_abs_ordering(self):
        eig = sym_eig(np.diag([-3.0, 1.0, 2.0]), ordering="abs")
        np.testing.assert_allclose(eig.values, [-3.0, 2.0, 1.0])
        assert np.all(np.diff(np.abs(eig.values)) <= 0)

    def test_abs_tie_broken_by_signed_value(self):
        eig = sym_eig(np.diag([-2.0, 2.0]), ordering="abs")
        np.testing.assert_allclose(eig.values, [2.0, -2.0])

    def test_sign_convention(self):
        rng = np.random.default_rng(7)
        m = symmetrize(rng.standard_normal((12, 12)))
        eig = sym_eig(m)
        for k in range(12):
            col = eig.vectors[:, k]
            assert col[np.argmax(np.abs(col))] >= 0

    def test_deterministic_bytes(self):
        rng = np.random.default_rng(3)
        m = symmetrize(rng.standard_normal((16, 16)))
        a = sym_eig(m)
        b = sym_eig(m)
        assert a.values.tobytes() == b.values.tobytes()
        assert a.vectors.tobytes() == b.vectors.tobytes()

    def test_degenerate_flags(self):
        eig = sym_eig(np.diag([1.0, 1.0, 2.0]))
        assert list(eig.degenerate) == [False, True, True]
        eig = sym_eig(np.diag([1.0, 2.0, 3.0]))
        assert not np.any(eig.degenerate)

    def test_bad_ordering(self):
        with pytest.raises(ValidationError):
            sym_eig(np.eye(2), ordering="weird")


class TestMatrixFunction:
    def test_expm_zero(self):
        np.testing.assert_allclose(expm(np.zeros((3, 3))).a, np.eye(3), atol=1e-15)

    def test_powm_diagonal(self):
        out = powm(np.diag([4.0, 9.0]), 0.5)
        np.testing.assert_allclose(out.a, np.diag([2.0, 3.0]), atol=1e-14)

    def test_log_exp_round_trip(self):
        a = np.array([[0.3, 0.1], [0.1, 0.2]])
        out = logm(expm(a))
        assert np.linalg.norm(out.a - a) <= 1e-10

    def test_log_exp_round_trip_bounded_spectrum(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
            lam = rng.uniform(-5.0, 5.0, 10)
            m = symmetrize((q * lam) @ q.T)
            assert np.linalg.norm(logm(expm(m)).a - m.a) <= 1e-9

    @pytest.mark.parametrize("n", [4, 17, 50])
    def test_sqrt_invariants(self, n):
        m = rand_spd(n, np.random.default_rng(n + 1))
        s = sqrtm(m)
        assert np.linalg.norm(s.a @ s.a - m.a) <= 1e-9 * np.linalg.norm(m.a)
        assert np.linalg.norm(invsqrtm(m).a @ s.a - np.eye(n)) <= 1e-9

    def test_powm_identities(self):
        m = rand_spd(12, np.random.default_rng(5))
        np.testing.assert_allclose(powm(m, 1.0).a, m.a, atol=1e-12)
        np.testing.assert_allclose(powm(m, 0.0).a, np.eye(12), atol=1e-12)
        for p in (0.25, 0.5, 2.0):
            back = powm(powm(m, p), 1.0 / p)
            assert np.linalg.norm(back.a - m.a) <= 1e-8

    def test_log_domain_error_names_eigenvalue(self):
        with pytest.raises(NumericalError, match="-1"):
            logm(np.diag([-1.0, 2.0]))

    def test_negative_power_domain_error(self):
        with pytest.raises(NumericalError):
            powm(np.diag([0.0, 1.0]), -0.5)


class TestSymmetrize:
    def test_symmetric_unchanged(self):
        a = np.array([[1.0, 2.0], [2.0, 5.0]])
        np.testing.assert_array_equal(symmetrize(a).a, a)

    def test_forced_by_formula(self):
        out = symmetrize(np.array([[0.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_array_equal(out.a, np.array([[0.0, 0.5], [0.5, 0.0]]))

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(2)
        out = symmetrize(rng.standard_normal((9, 9)))
        assert np.all(out.a == out.a.T)

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            symmetrize(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            SymmetricMatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestSpdMatrix:
    def test_validates_positive_definiteness(self):
        with pytest.raises(NumericalError):
            SpdMatrix(np.diag([1.0, -1.0]))
        with pytest.raises(NumericalError):
            SpdMatrix(np.diag([1.0, 0.0]))

    def test_relative_floor(self):
        # smallest eigenvalue below 1e-12 * largest is rejected by default
        with pytest.raises(NumericalError):
            SpdMatrix(np.diag([1.0, 1e-13]))
        SpdMatrix(np.diag([1.0, 1e-13]), min_eig_tol=0.0)

    def test_caches_spectrum_bounds(self):
        m = SpdMatrix(np.diag([2.0, 0.5]))
        assert m.eig_min == pytest.approx(0.5)
        assert m.eig_max == pytest.approx(2.0)
        assert m.cond() == pytest.approx(4.0)

    def test_from_kernel_accepts_roundoff_drift(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 1, (60, 2))
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        k = np.exp(-d2 / 0.05**2)  # numerically singular Gaussian kernel
        SpdMatrix.from_kernel(SymmetricMatrix(k))


def test_eigensystem_is_dataclass_with_dim():
    eig = sym_eig(np.eye(4))
    assert isinstance(eig, EigenSystem)
    assert eig.dim == 4
