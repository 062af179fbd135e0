import numpy as np
import pytest

from fncr.oracle import (dense_gradient, dense_sampling, dense_system,
                         dense_weighted_gradient, dense_weighted_laplacian,
                         direct_solve, is_diag_dominant, spectral_radius)

from conftest import random_weights


class TestDenseGradient:
    def test_shape(self):
        assert dense_gradient(4).shape == (32, 16)

    def test_unit_weight_reduction(self, rng):
        n = 5
        ones = np.ones((n, n))
        np.testing.assert_array_equal(dense_weighted_gradient((ones, ones)),
                                      dense_gradient(n))

    def test_laplacian_symmetry(self, rng):
        lap = dense_weighted_laplacian(random_weights(rng, 5))
        np.testing.assert_allclose(lap, lap.T, atol=1e-14)

    def test_size_guard(self):
        with pytest.raises(ValueError, match="n <= 64"):
            dense_gradient(65)


class TestDenseSampling:
    def test_unitary_when_full(self):
        phi = dense_sampling(np.ones((4, 4), dtype=bool))
        np.testing.assert_allclose(phi @ phi.conj().T, np.eye(16), atol=1e-12)

    def test_masked_rows_zero(self, rng):
        mask = rng.random((4, 4)) < 0.5
        phi = dense_sampling(mask)
        np.testing.assert_array_equal(phi[~mask.ravel(), :], 0.0)


class TestSystemHelpers:
    def test_system_is_identity_plus_spd_part(self, rng):
        w = random_weights(rng, 4)
        a = dense_system(w, 1.0, 0.05)
        np.testing.assert_allclose(a, a.T, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(a)) >= 1.0 - 1e-12

    def test_direct_solve(self, rng):
        a = np.eye(6) + 0.1 * rng.standard_normal((6, 6))
        b = rng.standard_normal(6)
        np.testing.assert_allclose(a @ direct_solve(a, b), b, atol=1e-10)

    def test_direct_solve_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            direct_solve(np.zeros((2, 3)), np.zeros(3))

    def test_spectral_radius(self):
        m = np.diag([3.0, -5.0, 1.0])
        assert spectral_radius(m) == pytest.approx(5.0)
        rot = np.array([[0.0, -2.0], [2.0, 0.0]])  # non-symmetric path
        assert spectral_radius(rot) == pytest.approx(2.0)

    def test_diag_dominance(self):
        assert is_diag_dominant(np.array([[3.0, 1.0], [-1.0, 2.5]]))
        assert not is_diag_dominant(np.array([[1.0, 1.0], [1.0, 1.0]]))
