"""Closed-form machinery for the 1D step-function denoising problem.

For a step of height h on (-L, L) the solution regime is decided by the
regularisation weights: piecewise-constant ROF solutions, the constant mean
value, or exponential (Huber-type) profiles that are continuous or keep the
jump. The 2-homogeneous p = 2 case has explicit constants; the
one-homogeneous problem maps onto it through beta <-> beta * ||w*||.

Also provides the dual-certificate verifier: given a candidate (u, w) for a
1D denoising problem it reconstructs the dual function phi by integrating
u - f and reports the residuals of the optimality conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .grids import Grid1D, Mode, SolveParams, conjugate_exponent


class StepModel(str, Enum):
    ONE_HOM = "1hom"
    TWO_HOM = "2hom"


class StepRegime(str, Enum):
    PIECEWISE_CONSTANT_ROF = "piecewise_constant_rof"
    CONSTANT_MEAN = "constant_mean"
    CONTINUOUS_EXPONENTIAL = "continuous_exponential"
    DISCONTINUOUS_EXPONENTIAL = "discontinuous_exponential"


@dataclass(frozen=True)
class StepProblem:
    """Step of height h jumping at x = 0 on the interval (-L, L)."""

    h: float
    L: float
    alpha: float
    beta: float
    p: float = 2.0
    model: StepModel = StepModel.TWO_HOM

    def __post_init__(self):
        if not (self.h > 0 and self.L > 0 and self.alpha > 0 and self.beta > 0):
            raise ValueError("h, L, alpha, beta must be positive")
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        object.__setattr__(self, "model", StepModel(self.model))

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    def data(self, x: np.ndarray) -> np.ndarray:
        """The step data: 0 on (-L, 0], h on (0, L)."""
        return np.where(np.asarray(x) > 0, self.h, 0.0)


@dataclass(frozen=True)
class StepAnalytic:
    """Closed-form solution of a step problem: constants and evaluators."""

    regime: StepRegime
    k: float
    c1: float
    c2: float
    u: Callable[[np.ndarray], np.ndarray]
    w: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray]


def rof_region(alpha: float, beta: float, p: float, omega_measure: float) -> bool:
    """Sufficient condition for w = 0 (ROF behaviour): beta/alpha >= |O|^(1/q)."""
    if not (alpha > 0 and beta > 0 and omega_measure > 0):
        raise ValueError("alpha, beta and the domain measure must be positive")
    q = conjugate_exponent(p)
    return beta / alpha >= omega_measure ** (1.0 / q)


def mean_region(f: Grid1D, alpha: float, beta: float, q: float) -> bool:
    """Sufficient condition for the constant solution u = mean(f).

    Requires alpha >= ||f - mean||_1 and beta >= |O|^(1/q) * ||f - mean||_1,
    with the quadrature-weighted L1 norm.
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    fbar = float(np.mean(f.values))
    l1 = float(np.sum(np.abs(f.values - fbar))) * f.spacing
    omega = f.n * f.spacing
    return alpha >= l1 and beta >= omega ** (1.0 / q) * l1


def _pc_threshold(L: float, q: float) -> float:
    return (2.0 * L / (q + 1.0)) ** (1.0 / q)


def _mean_beta_threshold(h: float, L: float, q: float) -> float:
    return 0.5 * h * (2.0 * L ** (q + 1.0) / (q + 1.0)) ** (1.0 / q)


def classify_step(problem: StepProblem) -> StepRegime:
    """Regime of the step solution.

    Two-homogeneous model: continuous iff tanh(kL)/k < 2*alpha/h with
    k = 1/sqrt(beta), else discontinuous. One-homogeneous model: the mean
    condition, then the piecewise-constant condition; outside both, the
    regime is the two-homogeneous classification of the matching problem
    found by inverting beta -> beta * ||w*||.
    """
    h, L, a, b = problem.h, problem.L, problem.alpha, problem.beta
    if problem.model is StepModel.TWO_HOM:
        k = 1.0 / math.sqrt(b)
        if math.tanh(k * L) / k < 2.0 * a / h:
            return StepRegime.CONTINUOUS_EXPONENTIAL
        return StepRegime.DISCONTINUOUS_EXPONENTIAL
    q = problem.q
    if a >= 0.5 * h * L and b >= _mean_beta_threshold(h, L, q):
        return StepRegime.CONSTANT_MEAN
    if b / a >= _pc_threshold(L, q):
        return StepRegime.PIECEWISE_CONSTANT_ROF
    beta2 = phom_beta_for_onehom(problem)
    return classify_step(
        StepProblem(h, L, a, beta2, p=problem.p, model=StepModel.TWO_HOM)
    )


def _sinh_minus_x(x: float) -> float:
    # sinh(x) - x loses precision for small x; switch to the series
    if x < 1e-2:
        x2 = x * x
        return x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    return math.sinh(x) - x


def _exp_constants(problem: StepProblem) -> tuple[StepRegime, float, float, float]:
    k = 1.0 / math.sqrt(problem.beta)
    h, L, a = problem.h, problem.L, problem.alpha
    e2kl_m1 = math.expm1(2.0 * k * L)
    if math.tanh(k * L) / k < 2.0 * a / h:
        regime = StepRegime.CONTINUOUS_EXPONENTIAL
        c2 = h / (2.0 * (e2kl_m1 + 2.0))
    else:
        regime = StepRegime.DISCONTINUOUS_EXPONENTIAL
        c2 = a * k / e2kl_m1
    c1 = c2 * (e2kl_m1 + 1.0)
    return regime, k, c1, c2


def step_exact_2hom(problem: StepProblem) -> StepAnalytic:
    """Exact 2-homogeneous p = 2 solution of the step problem.

    On (-L, 0]: u = c1*e^(kx) + c2*e^(-kx) with k = 1/sqrt(beta); mirrored by
    u(x) + u(-x) = h on (0, L). The dual function is
    phi = (c1/k)e^(kx) - (c2/k)e^(-kx) + c3 with phi(-L) = 0, extended evenly.
    """
    if problem.model is not StepModel.TWO_HOM:
        raise ValueError("exact solutions require the two-homogeneous model")
    if problem.p != 2.0:
        raise ValueError("exact solutions are implemented for p = 2 only")
    regime, k, c1, c2 = _exp_constants(problem)
    h, L = problem.h, problem.L

    def u(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        left = c1 * np.exp(k * x) + c2 * np.exp(-k * x)
        right = h - c1 * np.exp(-k * x) - c2 * np.exp(k * x)
        return np.where(x > 0, right, left)

    def w(x: np.ndarray) -> np.ndarray:
        # both branches collapse to the same expression in |x|
        x = np.asarray(x, dtype=np.float64)
        ax = np.abs(x)
        return k * c2 * (np.exp(2.0 * k * L - k * ax) - np.exp(k * ax))

    def phi(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        ax = -np.abs(x)
        c3 = -(c1 / k) * math.exp(-k * L) + (c2 / k) * math.exp(k * L)
        return (c1 / k) * np.exp(k * ax) - (c2 / k) * np.exp(-k * ax) + c3

    return StepAnalytic(regime=regime, k=k, c1=c1, c2=c2, u=u, w=w, phi=phi)


def step_solution(problem: StepProblem) -> StepAnalytic:
    """Closed-form step solution for either model and any regime.

    Piecewise-constant and mean regimes have w = 0 and piecewise-affine phi;
    exponential regimes delegate to `step_exact_2hom` (for the
    one-homogeneous model, at the matching 2-homogeneous beta).
    """
    regime = classify_step(problem)
    h, L, a = problem.h, problem.L, problem.alpha
    if regime is StepRegime.PIECEWISE_CONSTANT_ROF:
        lo, hi = a / L, h - a / L

        def u(x):
            return np.where(np.asarray(x) > 0, hi, lo)

        def w(x):
            return np.zeros_like(np.asarray(x, dtype=np.float64))

        def phi(x):
            return a * (L - np.abs(np.asarray(x))) / L

        return StepAnalytic(regime, 0.0, 0.0, 0.0, u, w, phi)
    if regime is StepRegime.CONSTANT_MEAN:

        def u(x):
            return np.full_like(np.asarray(x, dtype=np.float64), h / 2.0)

        def w(x):
            return np.zeros_like(np.asarray(x, dtype=np.float64))

        def phi(x):
            return 0.5 * h * (L - np.abs(np.asarray(x)))

        return StepAnalytic(regime, 0.0, 0.0, 0.0, u, w, phi)
    if problem.model is StepModel.TWO_HOM:
        return step_exact_2hom(problem)
    beta2 = phom_beta_for_onehom(problem)
    return step_exact_2hom(
        StepProblem(h, L, a, beta2, p=problem.p, model=StepModel.TWO_HOM)
    )


def w_norm_2hom(problem: StepProblem) -> float:
    """L2 norm of the analytic w: c2*sqrt(2k)*e^(kL)*(sinh(2kL) - 2kL)^(1/2).

    Direct integration of w(x)^2 gives the sqrt(2k) factor; only this version
    reproduces the large-beta limits beta*||w|| -> alpha*sqrt(2L/3) and
    (h/2)*sqrt(2L^3/3). Cross-checked against numerical quadrature in the
    tests.
    """
    if problem.model is not StepModel.TWO_HOM:
        raise ValueError("w_norm_2hom requires the two-homogeneous model")
    if problem.p != 2.0:
        raise ValueError("w_norm_2hom is implemented for p = 2 only")
    _, k, _, c2 = _exp_constants(problem)
    L = problem.L
    return c2 * math.sqrt(2.0 * k) * math.exp(k * L) * math.sqrt(_sinh_minus_x(2.0 * k * L))


def beta_map(beta_phom: float, w_norm: float, p: float) -> float:
    """Map the p-homogeneous beta to the equivalent one-homogeneous value:
    beta_1hom = beta_phom * ||w*||_p^(p-1)."""
    if not w_norm > 0:
        raise ValueError("the beta map is undefined for w_norm = 0 (constant data)")
    return beta_phom * w_norm ** (p - 1.0)


def beta_limit_2hom(alpha: float, h: float, L: float) -> float:
    """Large-beta limit of beta * ||w*||_2 for the step problem."""
    if alpha <= 0.5 * h * L:
        return alpha * math.sqrt(2.0 * L / 3.0)
    return 0.5 * h * math.sqrt(2.0 * L**3 / 3.0)


def phom_beta_for_onehom(problem: StepProblem) -> float:
    """Invert the beta map for the step: find beta2 with
    beta2 * ||w*(beta2)||_2 = beta_1hom (p = 2)."""
    if problem.p != 2.0:
        raise ValueError("the beta-map inverse is implemented for p = 2 only")
    a, h, L, b1 = problem.alpha, problem.h, problem.L, problem.beta
    limit = beta_limit_2hom(a, h, L)
    if b1 >= limit:
        raise ValueError(
            f"one-homogeneous beta {b1} is at or beyond the w = 0 limit {limit:.6g}"
        )

    def g(beta2: float) -> float:
        pb = StepProblem(h, L, a, beta2, p=2.0, model=StepModel.TWO_HOM)
        return beta2 * w_norm_2hom(pb)

    lo, hi = 1e-8, 1.0
    while g(hi) < b1:
        hi *= 10.0
        if hi > 1e18:
            raise ValueError("no matching two-homogeneous beta found")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if g(mid) < b1:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def taylor_beta_boundary(alpha: float, h: float, L: float) -> float:
    """Taylor approximation of the continuous/discontinuous boundary:
    beta = h*L^3 / (3*(h*L - 2*alpha)); the exact boundary has an asymptote
    at alpha = h*L/2, where this is rejected."""
    if not (alpha > 0 and h > 0 and L > 0):
        raise ValueError("alpha, h, L must be positive")
    denom = h * L - 2.0 * alpha
    if denom == 0:
        raise ValueError("alpha = h*L/2 is the asymptote of the boundary curve")
    return h * L**3 / (3.0 * denom)


@dataclass(frozen=True)
class CertificateReport:
    """Residuals of the four dual-certificate optimality conditions.

    boundary_residual: |phi| at the right endpoint (phi must vanish there).
    sup_residual: max|phi| - alpha (nonpositive when the sup constraint holds).
    sign_residual: max deviation of phi from alpha*sign(grad u - w) on the
    support of grad u - w.
    w_residual: for w = 0, ||phi||_q - beta; otherwise the max deviation of
    phi from beta*|w|^(p-2)w/||w||_p^(p-1).
    """

    boundary_residual: float
    sup_residual: float
    sign_residual: float
    w_residual: float
    w_is_zero: bool

    def passed(self, eps: float) -> bool:
        return (
            self.boundary_residual <= eps
            and self.sup_residual <= eps
            and self.sign_residual <= eps
            and self.w_residual <= eps
        )


def verify_optimality_1d(
    u: Grid1D,
    w: Grid1D,
    f: Grid1D,
    params: SolveParams,
    eps_supp: float | None = None,
    w_zero_tol: float = 1e-8,
) -> CertificateReport:
    """Dual-certificate check of a candidate 1D solution pair.

    Builds phi_i = t * sum_{j<=i}(u_j - f_j) (the discrete dual variable of
    the quadrature-weighted problem) and reports the residuals of the
    optimality system; the caller decides pass thresholds. For p-homogeneous
    parameters the equivalent one-homogeneous beta (beta * ||w||_p^(p-1)) is
    used, so the same conditions apply.
    """
    if not (u.n == w.n == f.n):
        raise ValueError("u, w, f must share one length")
    t = u.spacing
    n = u.n
    uv, wv, fv = u.values, w.values, f.values
    phi = t * np.cumsum(uv - fv)

    boundary = abs(float(phi[-1]))
    sup_res = float(np.max(np.abs(phi))) - params.alpha

    du = (uv[1:] - uv[:-1]) / t - wv[: n - 1]
    scale = float(np.max(np.abs(du))) if du.size else 0.0
    thr = (1e-6 * scale) if eps_supp is None else eps_supp
    support = np.abs(du) > thr
    if np.any(support):
        sign_res = float(
            np.max(np.abs(phi[: n - 1][support] - params.alpha * np.sign(du[support])))
        )
    else:
        sign_res = 0.0

    p = params.p
    wnorm = float(np.sum(np.abs(wv) ** p) * t) ** (1.0 / p)
    beta_eff = params.beta
    if params.mode is Mode.P_HOMOGENEOUS and wnorm > w_zero_tol:
        beta_eff = params.beta * wnorm ** (p - 1.0)
    if wnorm <= w_zero_tol:
        if params.mode is Mode.P_HOMOGENEOUS:
            # p-homogeneous condition phi = beta*|w|^(p-2)w degenerates to phi = 0
            w_res = float(np.max(np.abs(phi)))
        else:
            q = params.q
            phinorm_q = float(np.sum(np.abs(phi) ** q) * t) ** (1.0 / q)
            w_res = phinorm_q - params.beta
        w_zero = True
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            coeff = np.where(np.abs(wv) > 0, np.abs(wv) ** (p - 2.0), 0.0)
        target = beta_eff * coeff * wv / wnorm ** (p - 1.0)
        w_res = float(np.max(np.abs(phi[: n - 1] - target[: n - 1])))
        w_zero = False

    return CertificateReport(
        boundary_residual=boundary,
        sup_residual=sup_res,
        sign_residual=sign_res,
        w_residual=w_res,
        w_is_zero=w_zero,
    )
