"""Acceptance gate: end-to-end reconstruction targets and solver guarantees.

The heavy reconstructions run once per module (session fixtures) and several
tests assert different facets of the same run.
"""

import time

import numpy as np
import pytest

from fncr import (FncrConfig, add_noise, fncr_run, forward, grad, make_mask,
                  MaskSpec, penalty_value, psi, psi_prime, psnr,
                  sampling_ratio, shepp_logan, SplitConfig, splitting_solve)
from fncr.operators import (adjoint, grad_adjoint, laplacian_inf_norm,
                            weighted_div, weighted_grad)
from fncr.oracle import (dense_gradient, dense_sampling, dense_system,
                         dense_weighted_laplacian, direct_solve,
                         is_diag_dominant, spectral_radius)

from conftest import random_weights


@pytest.fixture(scope="module")
def truth256():
    return shepp_logan(256)


@pytest.fixture(scope="module")
def radial_problem(truth256):
    mask = make_mask(MaskSpec(kind="radial", n=256, rays=12))
    return mask, forward(truth256, mask)


@pytest.fixture(scope="module")
def radial_run(truth256, radial_problem):
    mask, z = radial_problem
    cfg = FncrConfig(r0=1e-4, gamma=0.05, psnr_target=100.0,
                     max_fb_total=6000)
    start = time.perf_counter()
    u, trace = fncr_run(z, mask, cfg, truth=truth256)
    return u, trace, time.perf_counter() - start


@pytest.fixture(scope="module")
def radial_run_loose_prox(truth256, radial_problem):
    # same problem solved with the loose inner tolerance 0.1
    mask, z = radial_problem
    cfg = FncrConfig(r0=1e-4, gamma=0.05, tau=0.1, psnr_target=100.0,
                     max_fb_total=6000)
    u, trace = fncr_run(z, mask, cfg, truth=truth256)
    return u, trace


@pytest.fixture(scope="module")
def random25_run(truth256):
    mask = make_mask(MaskSpec(kind="random", n=256, rate=0.25, seed=3))
    z = forward(truth256, mask)
    cfg = FncrConfig(r0=0.05, gamma=0.5, psnr_target=100.0, max_fb_total=6000)
    u, trace = fncr_run(z, mask, cfg, truth=truth256)
    return u, trace, mask


class TestRadialReconstruction:
    def test_sampling_ratio_band(self, radial_problem):
        mask, _ = radial_problem
        assert 5.2 <= sampling_ratio(mask) <= 6.2

    def test_final_psnr(self, truth256, radial_run):
        u, _, _ = radial_run
        assert psnr(u, truth256) >= 100.0

    def test_iteration_budget(self, radial_run):
        _, trace, _ = radial_run
        assert trace.n_bar <= 1200

    def test_runtime(self, radial_run):
        _, _, seconds = radial_run
        assert seconds <= 600.0

    def test_zero_fill_psnr(self, truth256, radial_problem):
        mask, z = radial_problem
        assert 15.8 <= psnr(adjoint(z, mask), truth256) <= 17.8


class TestRandomMaskReconstruction:
    def test_final_psnr(self, truth256, random25_run):
        u, _, _ = random25_run
        assert psnr(u, truth256) >= 100.0

    def test_iteration_budget(self, random25_run):
        _, trace, _ = random25_run
        assert trace.n_bar <= 300


class TestNoisyReconstruction:
    def test_final_psnr(self, truth256):
        mask = make_mask(MaskSpec(kind="random", n=256, rate=0.12, seed=1234))
        z = add_noise(forward(truth256, mask), mask, 1e-2, seed=5678)
        cfg = FncrConfig(r0=1e-2, gamma=0.2, psnr_target=38.0,
                         max_fb_total=2000)
        u, _ = fncr_run(z, mask, cfg, truth=truth256)
        assert psnr(u, truth256) >= 38.0


class TestSplittingStepBound:
    def test_contraction_inside_bound(self, rng):
        # I + beta theta Lap_w certifies the contraction: diagonally dominant
        # with positive spectrum exactly when the iteration matrix contracts
        beta = 1.0
        for _ in range(20):
            w = random_weights(rng, 8)
            norm = laplacian_inf_norm(w)
            theta = 0.8 / (beta * norm)
            lap = dense_weighted_laplacian(w)
            assert spectral_radius(beta * theta * lap) < 1.0
            cert = np.eye(lap.shape[0]) + beta * theta * lap
            assert is_diag_dominant(cert)
            assert np.min(np.linalg.eigvalsh(cert)) > 0.0

    def test_dominance_fails_outside_bound(self, rng):
        beta = 1.0
        for _ in range(20):
            w = random_weights(rng, 8)
            lap = dense_weighted_laplacian(w)
            theta = 2.0 / (beta * laplacian_inf_norm(w))
            cert = np.eye(lap.shape[0]) + beta * theta * lap
            assert not is_diag_dominant(cert)


class TestInnerSolverEquivalence:
    def test_matches_dense_direct_solve(self, rng):
        beta = 1.0
        for _ in range(10):
            n = 16
            w = random_weights(rng, n)
            theta = 0.8 / (beta * laplacian_inf_norm(w))
            vhat = rng.standard_normal((n, n))
            ex, ey = rng.standard_normal((2, n, n)) * 0.1
            zx, zy = rng.standard_normal((2, n, n)) * 0.1
            cfg = SplitConfig(lam=1.0, theta=theta, beta=beta, tau=1e-10,
                              max_inner_m=5000)
            x, _ = splitting_solve(vhat, w, ex, ey, zx, zy, cfg, vhat)
            rhs = vhat - beta * theta * weighted_div(
                (2.0 * ex - zx, 2.0 * ey - zy), w)
            ref = direct_solve(dense_system(w, beta, theta), rhs)
            assert (np.linalg.norm(x.ravel() - ref)
                    / np.linalg.norm(ref)) <= 1e-8


class TestReweightingDescent:
    def test_objective_decreases_when_lambda_decreases(self):
        # traced 64x64 run with accurately solved subproblems
        truth = shepp_logan(64)
        mask = make_mask(MaskSpec(kind="random", n=64, rate=0.3, seed=7))
        z = forward(truth, mask)
        cfg = FncrConfig(r0=0.05, gamma=0.05, tau=1e-4, max_fb_total=2500,
                         max_fb_per_call=200)
        _, trace = fncr_run(z, mask, cfg, truth=truth)
        pairs = 0
        for s1, s2 in zip(trace.steps, trace.steps[1:]):
            if s2.ell != s1.ell or s2.lam >= s1.lam:
                continue
            pairs += 1
            assert s2.objective <= s1.objective + 1e-12, (
                f"ascent at ell={s1.ell}, h={s1.h}->{s2.h}: "
                f"{s1.objective} -> {s2.objective}")
        assert pairs >= 10  # the run must actually exercise the update


class TestInnerIterationEconomy:
    def test_mean_inner_iterations_band(self, radial_run_loose_prox):
        _, trace = radial_run_loose_prox
        assert 2.0 <= trace.mean_inner_per_split <= 8.0


class TestOperatorSuite:
    def test_adjoint_dot_products(self, rng):
        for n in (5, 8, 16):
            mask = rng.random((n, n)) < 0.4
            mask[n // 2, n // 2] = True
            u = rng.standard_normal((n, n))
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            lhs = np.vdot(z, forward(u, mask)).real
            rhs = float(np.sum(adjoint(z, mask) * u))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

            gx, gy = rng.standard_normal((2, n, n))
            ux, uy = grad(u)
            lhs = float(np.sum(ux * gx) + np.sum(uy * gy))
            rhs = float(np.sum(u * grad_adjoint((gx, gy))))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

            w = random_weights(rng, n)
            wx, wy = weighted_grad(u, w)
            lhs = float(np.sum(wx * gx) + np.sum(wy * gy))
            rhs = float(np.sum(u * weighted_div((gx, gy), w)))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_dense_oracle_equivalence(self, rng):
        for n in (4, 6, 8):
            u = rng.standard_normal((n, n))
            gx, gy = grad(u)
            np.testing.assert_allclose(
                np.concatenate([gx.ravel(), gy.ravel()]),
                dense_gradient(n) @ u.ravel(), atol=1e-12)
            mask = rng.random((n, n)) < 0.5
            mask[n // 2, n // 2] = True
            np.testing.assert_allclose(
                forward(u, mask).ravel(),
                dense_sampling(mask) @ u.ravel(), atol=1e-12)

    def test_penalty_finite_differences(self):
        h = 1e-7
        for mu in (0.4, 1.0, 2.0):
            for t in (0.05, 0.5, 1.0, 3.0):
                fd = (psi(t + h, mu) - psi(t - h, mu)) / (2 * h)
                assert abs(psi_prime(t, mu) - fd) <= 1e-6

    def test_penalty_homotopy_counts_support(self):
        g = shepp_logan(64)
        gx, gy = grad(g)
        nnz = np.count_nonzero(gx) + np.count_nonzero(gy)
        mags = np.abs(np.concatenate([gx.ravel(), gy.ravel()]))
        mu = float(np.min(mags[mags > 0])) / 50.0
        assert abs(penalty_value((gx, gy), mu) / nnz - 1.0) <= 0.01
