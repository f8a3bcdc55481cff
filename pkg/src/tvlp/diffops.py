"""Discrete gradient, divergence and isotropic field norms.

The gradient uses forward differences with zero Neumann boundary (the last
row/column of the corresponding component is zero). The divergence is the
exact negative adjoint of the gradient, <-div w, u> = <w, grad u> for every
(u, w), which the split Bregman solver relies on; it is derived from the
adjoint identity rather than transcribed from any printed stencil.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .grids import Image2D, VectorField2D


def gradient(u: Image2D) -> VectorField2D:
    """Forward-difference gradient of an image, divided by the spacing."""
    g1, g2 = K.gradient(np.asarray(u.values), u.spacing)
    return VectorField2D(g1, g2, spacing=u.spacing)


def divergence(w: VectorField2D) -> Image2D:
    """Negative adjoint of `gradient` (backward differences with boundary rows)."""
    out = K.divergence(np.asarray(w.comp1), np.asarray(w.comp2), w.spacing)
    return Image2D(out, spacing=w.spacing)


def field_lp_norm(w: VectorField2D, p: float, quadrature: bool = False) -> float:
    """Isotropic field norm: pointwise Euclidean magnitude, then an lp sum.

    p = 1 gives the discrete total-variation-type norm. In quadrature mode
    the sum is weighted by t^d with d the effective dimension.
    """
    if math.isinf(p) or not p >= 1:
        raise ValueError(f"finite p >= 1 required, got {p}")
    mag = w.magnitude().ravel()
    s = float(np.sum(mag**p))
    if quadrature:
        s *= w.spacing**w.ndim_effective
    return s ** (1.0 / p)


def tv_value(u: Image2D, quadrature: bool = False) -> float:
    """Discrete isotropic total variation of an image."""
    return field_lp_norm(gradient(u), 1.0, quadrature)


def inner_product(a: np.ndarray, b: np.ndarray) -> float:
    """Plain (unweighted) Euclidean inner product of two arrays."""
    return float(np.sum(np.asarray(a) * np.asarray(b)))


def field_inner_product(v: VectorField2D, w: VectorField2D) -> float:
    """Sum of the componentwise inner products of two fields."""
    return inner_product(v.comp1, w.comp1) + inner_product(v.comp2, w.comp2)
