"""Sampled signals, images, vector fields and solver parameter bundles.

All value types are immutable after construction (arrays are copied and
marked read-only), so they are safe to share across threads; operations
return new objects.

Two norm conventions coexist throughout the package. In "quadrature" mode
sums are weighted by t^d (d = effective dimension), which is the convention
under which continuum parameters on a physical interval make sense; in
plain discrete mode the spacing is ignored in norms. One-column images are
treated as one dimensional signals (d = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class NonFiniteError(RuntimeError):
    """Raised when an iterative scheme produces NaN or Inf values."""


def _readonly(a, ndim):
    out = np.array(a, dtype=np.float64, copy=True)
    if out.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("values must be finite")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid1D:
    """A uniformly sampled real signal on an interval.

    Samples are cell-centred: sample i lives at origin + (i + 1/2) * spacing.
    """

    values: np.ndarray
    spacing: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        v = _readonly(self.values, 1)
        if v.size < 2:
            raise ValueError("Grid1D needs at least 2 samples")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def cell_centers(self) -> np.ndarray:
        return self.origin + (np.arange(self.n) + 0.5) * self.spacing

    def to_image(self) -> "Image2D":
        return Image2D(self.values[:, None], spacing=self.spacing)


@dataclass(frozen=True)
class Image2D:
    """An n x m real image with uniform pixel spacing.

    m = 1 column images carry one dimensional semantics (signals routed
    through the 2D machinery).
    """

    values: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        v = _readonly(self.values, 2)
        n, m = v.shape
        if n < 2 or m < 1:
            raise ValueError(f"Image2D needs shape (>=2, >=1), got {v.shape}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def ndim_effective(self) -> int:
        """1 for one-column images, 2 otherwise."""
        return 1 if self.values.shape[1] == 1 else 2

    def to_grid1d(self, origin: float = 0.0) -> Grid1D:
        if self.values.shape[1] != 1:
            raise ValueError("only one-column images convert to Grid1D")
        return Grid1D(self.values[:, 0], spacing=self.spacing, origin=origin)

    def with_values(self, values) -> "Image2D":
        return Image2D(values, spacing=self.spacing)


@dataclass(frozen=True)
class VectorField2D:
    """A two-component field over an image grid (one vector per pixel)."""

    comp1: np.ndarray
    comp2: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        c1 = _readonly(self.comp1, 2)
        c2 = _readonly(self.comp2, 2)
        if c1.shape != c2.shape:
            raise ValueError(f"component shapes differ: {c1.shape} vs {c2.shape}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "comp1", c1)
        object.__setattr__(self, "comp2", c2)

    @property
    def shape(self) -> tuple[int, int]:
        return self.comp1.shape

    @property
    def ndim_effective(self) -> int:
        return 1 if self.comp1.shape[1] == 1 else 2

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude."""
        return np.hypot(self.comp1, self.comp2)

    @staticmethod
    def zeros(shape: tuple[int, int], spacing: float = 1.0) -> "VectorField2D":
        z = np.zeros(shape)
        return VectorField2D(z, z.copy(), spacing=spacing)


class Mode(str, Enum):
    """Homogeneity of the w-penalty: beta*||w||_p or (beta/p)*||w||_p^p."""

    ONE_HOMOGENEOUS = "1hom"
    P_HOMOGENEOUS = "phom"


def conjugate_exponent(p: float) -> float:
    """Holder conjugate: p/(p-1) for finite p > 1, and 1 for p = inf."""
    if math.isinf(p):
        return 1.0
    if not p > 1:
        raise ValueError(f"conjugate exponent needs p > 1, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class SolveParams:
    """Parameter bundle for the TV-Lp denoising solves.

    lam is the splitting penalty; when None it defaults to 10*alpha for
    p < 4 and 1000*alpha for p >= 4. quadrature=None resolves to True for
    one-column images and False otherwise.
    """

    alpha: float
    beta: float
    p: float = 2.0
    mode: Mode = Mode.ONE_HOMOGENEOUS
    lam: float | None = None
    tol: float = 1e-6
    max_outer: int = 5000
    inner_fp_iters: int = 5
    quadrature: bool | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_outer < 1 or self.inner_fp_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    def lam_resolved(self, spacing: float = 1.0) -> float:
        """Split-penalty default: 10*alpha for p < 4, 1000*alpha for p >= 4,
        scaled by the grid spacing (the rule is stated for unit pixels; the
        spacing factor keeps it covariant under grid refinement)."""
        if self.lam is not None:
            return self.lam
        base = 10.0 * self.alpha if self.p < 4.0 else 1000.0 * self.alpha
        return base * spacing

    def quadrature_for(self, image: Image2D) -> bool:
        if self.quadrature is not None:
            return self.quadrature
        return image.ndim_effective == 1


def weighted_lp_norm(g: Grid1D | Image2D, p: float, quadrature: bool = False) -> float:
    """lp norm of the samples, optionally t^d-weighted (d = effective dim)."""
    if math.isinf(p) or not p >= 1:
        raise ValueError(f"finite p >= 1 required, got {p}")
    v = np.abs(np.asarray(g.values, dtype=np.float64)).ravel()
    s = float(np.sum(v**p))
    if quadrature:
        d = 1 if isinstance(g, Grid1D) else g.ndim_effective
        s *= g.spacing**d
    return s ** (1.0 / p)


def mean_value(f: Grid1D | Image2D) -> float:
    """Arithmetic mean of the samples (the uniform-quadrature average)."""
    return float(np.mean(f.values))
