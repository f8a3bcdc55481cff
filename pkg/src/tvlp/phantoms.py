"""Deterministic test phantoms and seeded Gaussian noise.

1D phantoms live on (-L, L) with cell-centred samples and physical spacing
2L/n; they are unnormalised (step heights around 100). 2D phantoms are
size x size images in [0, 1] with unit spacing. The 2D geometries are
parameterised stand-ins: piecewise-affine content around a raised square,
and radial structures with a sharp central spike.

Noise uses a named generator so streams are bit-reproducible everywhere:
xorshift64* state advanced in row-major order, Gaussians via Box-Muller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import Image2D

KINDS = ("step1d", "affine_step1d", "piecewise_mix1d", "ramp_square2d", "radial_spike2d")


@dataclass(frozen=True)
class PhantomSpec:
    """Geometry request for `generate`. Unused fields are ignored per kind."""

    kind: str
    h: float = 100.0
    L: float = 1.0
    n: int = 2000
    slope: float = 0.1
    size: int = 200

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}; choose from {KINDS}")
        if self.kind.endswith("1d"):
            if self.n < 2:
                raise ValueError("1D phantoms need n >= 2")
            if not (self.h > 0 and self.L > 0):
                raise ValueError("h and L must be positive")
        else:
            if self.size < 16:
                raise ValueError("2D phantoms need size >= 16")


@dataclass(frozen=True)
class NoiseSpec:
    variance: float
    seed: int = 42

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")


def _centers(n: int, L: float) -> np.ndarray:
    t = 2.0 * L / n
    return -L + (np.arange(n) + 0.5) * t


def generate(spec: PhantomSpec) -> Image2D:
    """Deterministic phantom image for the given spec."""
    if spec.kind == "step1d":
        x = _centers(spec.n, spec.L)
        f = np.where(x > 0, spec.h, 0.0)
        return Image2D(f[:, None], spacing=2.0 * spec.L / spec.n)
    if spec.kind == "affine_step1d":
        x = _centers(spec.n, spec.L)
        f = spec.slope * x + np.where(x > 0, spec.h, 0.0)
        return Image2D(f[:, None], spacing=2.0 * spec.L / spec.n)
    if spec.kind == "piecewise_mix1d":
        x = _centers(spec.n, spec.L)
        L = spec.L
        f = np.full_like(x, 20.0)
        ramp = (-0.6 * L <= x) & (x < -0.1 * L)
        f[ramp] = 60.0 - 25.0 * (x[ramp] + 0.6 * L) / (0.5 * L)
        quad = (-0.1 * L <= x) & (x < 0.4 * L)
        s = x[quad] / L
        f[quad] = 35.0 + 240.0 * (s + 0.1) * (0.4 - s)
        f[x >= 0.4 * L] = 80.0
        return Image2D(f[:, None], spacing=2.0 * L / spec.n)
    if spec.kind == "ramp_square2d":
        return _ramp_square(spec.size)
    if spec.kind == "radial_spike2d":
        return _radial_spike(spec.size)
    raise ValueError(f"unknown phantom kind {spec.kind!r}")


def _unit_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    c = (np.arange(size) + 0.5) / size * 2.0 - 1.0
    return np.meshgrid(c, c, indexing="ij")


def _ramp_square(size: int) -> Image2D:
    # affine background plane with a raised pyramidal square in the middle
    x, y = _unit_grid(size)
    img = 0.15 + 0.10 * (x + 1.0) / 2.0 + 0.08 * (y + 1.0) / 2.0
    half = 0.55
    inside = (np.abs(x) <= half) & (np.abs(y) <= half)
    pyramid = 0.55 + 0.35 * (1.0 - np.maximum(np.abs(x), np.abs(y)) / half)
    img = np.where(inside, pyramid, img)
    return Image2D(np.clip(img, 0.0, 1.0), spacing=1.0)


def _radial_spike(size: int) -> Image2D:
    # smooth dome on a flat background, ring step, and a sharp central cone
    x, y = _unit_grid(size)
    r = np.hypot(x, y)
    img = np.full_like(r, 0.1)
    disc = r <= 0.75
    img[disc] = 0.25 + 0.5 * np.cos(r[disc] / 0.75 * np.pi / 2.0) ** 2
    spike = np.maximum(0.0, 1.0 - r / 0.08)
    img = np.maximum(img, 0.25 + 0.75 * spike)
    return Image2D(np.clip(img, 0.0, 1.0), spacing=1.0)


# --- deterministic noise -----------------------------------------------------

_MASK = (1 << 64) - 1
_XS_MULT = 2685821657736338717
_DEFAULT_STATE = 0x9E3779B97F4A7C15


def _xorshift64star_uniforms(count: int, seed: int) -> np.ndarray:
    """count uniforms in (0, 1] from the xorshift64* stream for this seed."""
    state = (int(seed) & _MASK) or _DEFAULT_STATE
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        state ^= state >> 12
        state = (state ^ (state << 25)) & _MASK
        state ^= state >> 27
        word = (state * _XS_MULT) & _MASK
        out[i] = ((word >> 11) + 1) * 2.0**-53
    return out


def gaussian_stream(count: int, seed: int) -> np.ndarray:
    """count standard normals via Box-Muller over the xorshift64* stream."""
    pairs = (count + 1) // 2
    u = _xorshift64star_uniforms(2 * pairs, seed)
    u1 = u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * math.pi * u2)
    z[1::2] = r * np.sin(2.0 * math.pi * u2)
    return z[:count]


def add_gaussian_noise(u: Image2D, spec: NoiseSpec) -> Image2D:
    """u + sigma * N(0,1) with sigma = sqrt(variance), row-major sample order."""
    if spec.variance == 0:
        return Image2D(u.values, spacing=u.spacing)
    sigma = math.sqrt(spec.variance)
    n, m = u.shape
    z = gaussian_stream(n * m, spec.seed).reshape(n, m)
    return Image2D(u.values + sigma * z, spacing=u.spacing)
