"""Image quality metrics: PSNR and mean local SSIM.

SSIM follows the standard reference settings: 11x11 Gaussian window with
sigma 1.5, stabilisers C1 = (0.01*range)^2 and C2 = (0.03*range)^2, local
statistics over the valid (fully-overlapping) window positions.
"""

from __future__ import annotations

import math

import numpy as np

from .grids import Image2D

_WINDOW_SIZE = 11
_WINDOW_SIGMA = 1.5


def psnr(u: Image2D, reference: Image2D, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images coincide."""
    if u.shape != reference.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {reference.shape}")
    if not peak > 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((u.values - reference.values) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / mse)


def _gaussian_window() -> np.ndarray:
    half = (_WINDOW_SIZE - 1) / 2.0
    x = np.arange(_WINDOW_SIZE) - half
    g = np.exp(-(x**2) / (2.0 * _WINDOW_SIGMA**2))
    w = np.outer(g, g)
    return w / w.sum()


def _valid_filter(img: np.ndarray, window: np.ndarray) -> np.ndarray:
    # separable weights would also work; direct correlation is fine at desk scale
    n, m = img.shape
    k = window.shape[0]
    out = np.zeros((n - k + 1, m - k + 1))
    for di in range(k):
        for dj in range(k):
            out += window[di, dj] * img[di : di + n - k + 1, dj : dj + m - k + 1]
    return out


def ssim(u: Image2D, reference: Image2D, dynamic_range: float = 1.0) -> float:
    """Mean local structural similarity of u against the reference."""
    if u.shape != reference.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {reference.shape}")
    n, m = u.shape
    if n < _WINDOW_SIZE or m < _WINDOW_SIZE:
        raise ValueError(f"images must be at least {_WINDOW_SIZE} pixels in each dimension")
    if not dynamic_range > 0:
        raise ValueError("dynamic_range must be positive")
    x = np.asarray(u.values)
    y = np.asarray(reference.values)
    win = _gaussian_window()
    c1 = (0.01 * dynamic_range) ** 2
    c2 = (0.03 * dynamic_range) ** 2

    mu_x = _valid_filter(x, win)
    mu_y = _valid_filter(y, win)
    xx = _valid_filter(x * x, win) - mu_x**2
    yy = _valid_filter(y * y, win) - mu_y**2
    xy = _valid_filter(x * y, win) - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (xx + yy + c2)
    return float(np.mean(num / den))
