"""Fast NonConvex Reweighting driver.

Nesting, outermost first: continuation on the scale ``mu`` (shrunk by 0.8 per
pass down to a floor), iterative reweighted l1 with an adaptive penalization
parameter, accelerated forward-backward iterations, and the Split Bregman
backward step from :mod:`fncr.bregman`.

The reweighting uses normalized coefficients ``psi'(t)/psi'(0)`` in (0, 1], so
the splitting-solver step bound computed from unit weights stays valid for
every weight field the solver can produce; the ``psi'(0)`` magnitude at the
initial scale is absorbed into the penalization parameter once, at startup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bregman import fast_split
from .operators import adjoint, forward, grad, laplacian_inf_norm
from .penalty import (data_misfit, normalized_weights, penalty_value,
                      weighted_l1)

_LOG2 = math.log(2.0)


@dataclass
class FncrConfig:
    """Solver parameters; the defaults correspond to the radial-mask setting."""

    r0: float = 1e-4
    gamma: float = 0.05
    beta: float = 1.0
    tau: float = 1e-2
    mu_factor: float = 0.8
    mu_min: float = 1e-3
    theta_safety: float = 0.8
    h_max: int = 2
    lambda_clip: float = 0.95
    outer_tol: float = 1e-8
    psnr_target: float | None = None
    max_fb_total: int = 6000
    max_outer_l: int = 800
    max_fb_per_call: int = 60
    max_outer_j: int = 100
    max_inner_m: int = 100
    abs_delta_stop: bool = True

    def __post_init__(self):
        if self.r0 <= 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.beta < 2:
            raise ValueError(f"beta must be in (0, 2), got {self.beta}")
        if not 0 < self.tau < 1:
            raise ValueError(f"tau must be in (0, 1), got {self.tau}")
        if not 0 < self.mu_factor < 1:
            raise ValueError(f"mu_factor must be in (0, 1), got {self.mu_factor}")
        if self.mu_min <= 0:
            raise ValueError(f"mu_min must be positive, got {self.mu_min}")
        if not 0 < self.theta_safety < 1:
            raise ValueError(f"theta_safety must be in (0, 1), got {self.theta_safety}")
        if self.h_max < 1:
            raise ValueError(f"h_max must be >= 1, got {self.h_max}")
        if not 0 < self.lambda_clip <= 1:
            raise ValueError(f"lambda_clip must be in (0, 1], got {self.lambda_clip}")


@dataclass
class IRl1Step:
    """One reweighting step: parameters used and the resulting objective."""

    ell: int
    h: int
    mu: float
    lam: float
    objective: float
    surrogate: float
    fb_iters: int
    inner_iters: int
    split_calls: int


@dataclass
class FncrTrace:
    mu_values: list = field(default_factory=list)
    lambda_values: list = field(default_factory=list)
    tot_it: list = field(default_factory=list)
    psnr_values: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    n_bar: int = 0
    total_inner: int = 0
    total_split_calls: int = 0

    @property
    def mean_inner_per_split(self):
        if self.total_split_calls == 0:
            return 0.0
        return self.total_inner / self.total_split_calls


def init_state(z, mask, cfg: FncrConfig):
    """Starting point of the continuation.

    Returns ``(u0, lambda0, mu0, weights)`` with ``u0 = Phi^T z`` and unit
    weights.  ``mu0`` is the largest gradient magnitude of ``u0`` (the scale at
    which the reweighting starts to separate edges from flat regions), and
    ``lambda0 = r0 ||u0||_1 / (2 ||grad u0||_1 log 2)`` folds the magnitude of
    the unnormalized reweighting coefficient at scale ``mu0`` into the
    penalization parameter once and for all.
    """
    u0 = adjoint(z, mask)
    l1 = float(np.sum(np.abs(u0)))
    gx, gy = grad(u0)
    g1 = float(np.sum(np.abs(gx)) + np.sum(np.abs(gy)))
    if l1 == 0.0 or g1 == 0.0:
        raise ValueError("degenerate input: zero image or zero gradient, "
                         "lambda0/mu0 would vanish")
    lam0 = cfg.r0 * l1 / (2.0 * g1 * _LOG2)
    mu0 = float(max(np.max(np.abs(gx)), np.max(np.abs(gy))))
    ones = np.ones_like(u0)
    return u0, lam0, mu0, (ones, ones.copy())


def theta_from_weights(w, beta, safety):
    """Penalty parameter strictly inside the splitting convergence bound."""
    return safety / (beta * laplacian_inf_norm(w))


def fista_step(t_prev):
    """Momentum recursion; returns ``(t_next, alpha)`` with ``t_0 = 1``."""
    if t_prev < 1:
        raise ValueError(f"t_prev must be >= 1, got {t_prev}")
    t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_prev * t_prev))
    return t_next, (t_prev - 1.0) / t_next


def fb_solve(z, mask, w, lam, beta, theta, tau, gamma, u_start,
             max_iters=5000, max_outer_j=100, max_inner_m=100,
             abs_delta_stop=True):
    """Accelerated forward-backward loop for one weighted-l1 subproblem.

    Returns ``(u_hat, n_iters, inner_total, split_calls)``.  Stops when the
    change of the weighted TV value per iteration falls below
    ``gamma * lam`` (checked from the second iteration on).
    """
    zm = np.where(mask, z, 0.0)
    u_hat = np.array(u_start, dtype=float)
    u_tilde_prev = u_hat.copy()
    t = 1.0
    delta_prev = None
    inner_total = 0
    split_calls = 0
    n = 0
    while n < max_iters:
        vhat = u_hat + beta * adjoint(zm - forward(u_hat, mask), mask)
        u_tilde, m = fast_split(lam, theta, beta, vhat, w, tau,
                                max_outer_j=max_outer_j, max_inner_m=max_inner_m)
        inner_total += m
        split_calls += 1
        t, alpha = fista_step(t)
        u_hat = u_tilde + alpha * (u_tilde - u_tilde_prev)
        u_tilde_prev = u_tilde
        n += 1
        if not np.all(np.isfinite(u_hat)):
            raise FloatingPointError(
                "forward-backward iterate diverged; check beta/theta configuration"
            )
        delta = weighted_l1(grad(u_hat), w)
        if delta_prev is not None:
            change = abs(delta - delta_prev) if abs_delta_stop else delta - delta_prev
            if change < gamma * lam:
                break
        delta_prev = delta
    return u_hat, n, inner_total, split_calls


def lambda_update(lam_h, p_h, p_hm1, clip_lo=0.95):
    """Adaptive penalization update ``lam * p_h / p_hm1``.

    The ratio is clamped to ``[clip_lo, 1]``: the sequence is nonincreasing
    and cannot collapse faster than geometrically.
    """
    if p_hm1 <= 0:
        raise ValueError(f"previous objective must be positive, got {p_hm1}")
    return lam_h * min(max(p_h / p_hm1, clip_lo), 1.0)


def continuation_objective(u, z, mask, mu, lam):
    """Nonconvex objective in normalized-weight units.

    ``lam * 2 mu log2 * F_mu(Du) + 0.5 ||Phi u - z||^2``; its gradient-sparsity
    term is the primitive of the normalized reweighting coefficients, so it is
    the function the weighted-l1 subproblems majorize.
    """
    return (lam * 2.0 * mu * _LOG2 * penalty_value(grad(u), mu)
            + data_misfit(u, z, mask))


def _rel_change(u_new, u_old):
    denom = np.linalg.norm(u_old)
    if denom == 0.0:
        return np.inf
    return np.linalg.norm(u_new - u_old) / denom


def fncr_run(z, mask, cfg: FncrConfig, truth=None):
    """Full reconstruction; returns ``(image, trace)``.

    The continuation loop stops on relative iterate change below
    ``cfg.outer_tol``, on reaching ``cfg.psnr_target`` (when ``truth`` is
    given), or when the forward-backward budget ``cfg.max_fb_total`` is spent.
    """
    from .data import psnr

    u_hat, lam, mu, w = init_state(z, mask, cfg)
    trace = FncrTrace()
    p_prev = None

    for ell in range(cfg.max_outer_l):
        u_ell_start = u_hat
        trace.mu_values.append(mu)
        fb_this_ell = 0
        for h in range(cfg.h_max):
            theta = theta_from_weights(w, cfg.beta, cfg.theta_safety)
            budget = cfg.max_fb_total - trace.n_bar
            if budget <= 0:
                break
            u_prev = u_hat
            # Pre-solve objective with the lambda about to be used: the
            # majorizer is tangent to the nonconvex objective here, so this
            # value drives the adaptive lambda update.
            p_cur = continuation_objective(u_prev, z, mask, mu, lam)
            u_hat, n_fb, inner, calls = fb_solve(
                z, mask, w, lam, cfg.beta, theta, cfg.tau, cfg.gamma, u_hat,
                max_iters=min(cfg.max_fb_per_call, budget),
                max_outer_j=cfg.max_outer_j,
                max_inner_m=cfg.max_inner_m, abs_delta_stop=cfg.abs_delta_stop)
            fb_this_ell += n_fb
            trace.n_bar += n_fb
            trace.total_inner += inner
            trace.total_split_calls += calls

            surr = lam * weighted_l1(grad(u_hat), w) + data_misfit(u_hat, z, mask)
            obj = continuation_objective(u_hat, z, mask, mu, lam)
            trace.steps.append(IRl1Step(ell=ell, h=h, mu=mu, lam=lam,
                                        objective=obj, surrogate=surr,
                                        fb_iters=n_fb, inner_iters=inner,
                                        split_calls=calls))
            trace.lambda_values.append(lam)
            if p_prev is not None:
                lam = lambda_update(lam, p_cur, p_prev, cfg.lambda_clip)
            p_prev = p_cur
            w = normalized_weights(grad(u_hat), mu)
            if _rel_change(u_hat, u_prev) < cfg.outer_tol:
                break

        trace.tot_it.append(fb_this_ell)
        if truth is not None:
            trace.psnr_values.append(psnr(u_hat, truth))
        mu = max(mu * cfg.mu_factor, cfg.mu_min)

        if truth is not None and cfg.psnr_target is not None \
                and trace.psnr_values[-1] >= cfg.psnr_target:
            break
        if trace.n_bar >= cfg.max_fb_total:
            break
        if _rel_change(u_hat, u_ell_start) < cfg.outer_tol:
            break

    return u_hat, trace
