"""TV-Lp infimal-convolution regularisation: denoising, decomposition and
closed-form 1D oracles for the split Bregman solver."""

from ._kernels import backend_name
from .analytic import (
    CertificateReport,
    StepAnalytic,
    StepModel,
    StepProblem,
    StepRegime,
    beta_limit_2hom,
    beta_map,
    classify_step,
    mean_region,
    phom_beta_for_onehom,
    rof_region,
    step_exact_2hom,
    step_solution,
    taylor_beta_boundary,
    verify_optimality_1d,
    w_norm_2hom,
)
from .bregman import BregmanTrace, bregmanized_denoise
from .dct import NeumannSpectrum, dct2, idct2, neumann_eigenvalues, solve_screened_poisson
from .decompose import Decomposition, UniquenessReport, check_decomposition_uniqueness, decompose
from .diffops import divergence, field_lp_norm, gradient, tv_value
from .grids import (
    Grid1D,
    Image2D,
    Mode,
    NonFiniteError,
    SolveParams,
    VectorField2D,
    conjugate_exponent,
    mean_value,
    weighted_lp_norm,
)
from .metrics import psnr, ssim
from .phantoms import NoiseSpec, PhantomSpec, add_gaussian_noise, gaussian_stream, generate
from .prox import (
    HuberParams,
    huber_phi,
    huber_tv_value,
    huber_w_star,
    lp_prox_fixed_point,
    lp_prox_residual,
    phom_prox,
    phom_prox_p2,
    shrink,
)
from .solver import (
    SolveReport,
    SolveState,
    continuum_to_discrete_beta,
    denoise,
    denoise_rof,
    inner_min_dual_ascent,
    inner_min_subgradient,
    objective,
    tvlp_value,
)

__version__ = "0.1.0"

__all__ = [
    "BregmanTrace",
    "CertificateReport",
    "Decomposition",
    "Grid1D",
    "HuberParams",
    "Image2D",
    "Mode",
    "NeumannSpectrum",
    "NoiseSpec",
    "NonFiniteError",
    "PhantomSpec",
    "SolveParams",
    "SolveReport",
    "SolveState",
    "StepAnalytic",
    "StepModel",
    "StepProblem",
    "StepRegime",
    "UniquenessReport",
    "VectorField2D",
    "add_gaussian_noise",
    "backend_name",
    "beta_limit_2hom",
    "beta_map",
    "bregmanized_denoise",
    "check_decomposition_uniqueness",
    "classify_step",
    "conjugate_exponent",
    "continuum_to_discrete_beta",
    "dct2",
    "decompose",
    "denoise",
    "denoise_rof",
    "divergence",
    "field_lp_norm",
    "gaussian_stream",
    "generate",
    "gradient",
    "huber_phi",
    "huber_tv_value",
    "huber_w_star",
    "idct2",
    "inner_min_dual_ascent",
    "inner_min_subgradient",
    "lp_prox_fixed_point",
    "lp_prox_residual",
    "mean_region",
    "mean_value",
    "neumann_eigenvalues",
    "objective",
    "phom_beta_for_onehom",
    "phom_prox",
    "phom_prox_p2",
    "psnr",
    "rof_region",
    "shrink",
    "solve_screened_poisson",
    "ssim",
    "step_exact_2hom",
    "step_solution",
    "taylor_beta_boundary",
    "tv_value",
    "tvlp_value",
    "verify_optimality_1d",
    "w_norm_2hom",
    "weighted_lp_norm",
]
