"""Compressed-sensing MRI reconstruction with nonconvex reweighted gradient sparsity."""

from .bregman import SplitConfig, cut, fast_split, soft, splitting_solve
from .data import (MaskSpec, add_noise, blocks_phantom, make_mask, psnr,
                   sampling_ratio, shepp_logan)
from .operators import (adjoint, forward, grad, grad_adjoint,
                        laplacian_inf_norm, weighted_div, weighted_grad,
                        weighted_laplacian_apply)
from .penalty import (PenaltyParams, compute_weights, normalized_weights,
                      objective_nonconvex, objective_surrogate, penalty_value,
                      psi, psi_prime, weighted_l1)
from .solver import (FncrConfig, FncrTrace, continuation_objective, fb_solve,
                     fista_step, fncr_run, init_state, lambda_update,
                     theta_from_weights)

__all__ = [
    "SplitConfig", "cut", "fast_split", "soft", "splitting_solve",
    "MaskSpec", "add_noise", "blocks_phantom", "make_mask", "psnr",
    "sampling_ratio", "shepp_logan",
    "adjoint", "forward", "grad", "grad_adjoint", "laplacian_inf_norm",
    "weighted_div", "weighted_grad", "weighted_laplacian_apply",
    "PenaltyParams", "compute_weights", "normalized_weights",
    "objective_nonconvex", "objective_surrogate", "penalty_value", "psi",
    "psi_prime", "weighted_l1",
    "FncrConfig", "FncrTrace", "continuation_objective", "fb_solve",
    "fista_step", "fncr_run", "init_state", "lambda_update",
    "theta_from_weights",
]
