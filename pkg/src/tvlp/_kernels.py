"""Hot numeric kernels: numba-jitted fast path with a pure-numpy fallback.

The backend is fixed at import time from the ``TVLP_BACKEND`` environment
variable: ``numba`` (raise if numba is missing), ``numpy`` (force the
fallback), or ``auto`` (default: numba when importable). Both paths compute
the same formulas; ``benchmarks/bench_kernels.py`` compares their speed.

All kernels operate on plain float64 arrays. Vector fields are passed as
component pairs; a pixel's magnitude is always the Euclidean norm of its
two components.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_VAR = "TVLP_BACKEND"


def _read_backend_request() -> str:
    req = os.environ.get(_ENV_VAR, "auto").lower()
    if req not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {req!r}")
    return req


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------


def _np_gradient(u, t):
    g1 = np.zeros_like(u)
    g2 = np.zeros_like(u)
    # forward differences, zero on the last row/column (Neumann)
    g1[:-1, :] = (u[1:, :] - u[:-1, :]) / t
    g2[:, :-1] = (u[:, 1:] - u[:, :-1]) / t
    return g1, g2


def _np_divergence(w1, w2, t):
    # exact negative adjoint of _np_gradient; the last row of w1 and last
    # column of w2 never enter (the gradient is zero there).
    n, m = w1.shape
    out = np.zeros_like(w1)
    if n > 1:
        out[0, :] += w1[0, :]
        out[1:-1, :] += w1[1:-1, :] - w1[:-2, :]
        out[-1, :] += -w1[-2, :]
    if m > 1:
        out[:, 0] += w2[:, 0]
        out[:, 1:-1] += w2[:, 1:-1] - w2[:, :-2]
        out[:, -1] += -w2[:, -2]
    out /= t
    return out


def _np_shrink(g1, g2, thr):
    mag = np.sqrt(g1 * g1 + g2 * g2)
    safe = np.where(mag > 0.0, mag, 1.0)
    scale = np.where(mag > thr, (mag - thr) / safe, 0.0)
    return g1 * scale, g2 * scale


def _np_lp_fp_sweep(w1, w2, e1, e2, kappa, p):
    mag = np.sqrt(w1 * w1 + w2 * w2)
    norm_pm1 = float(np.sum(mag**p)) ** ((p - 1.0) / p)
    if p < 2.0:
        # |w|^(p-2) blows up at 0; the 0/0 -> 0 convention maps those pixels to 0
        small = mag < 1e-14
        magp = np.where(small, 1.0, mag) ** (p - 2.0)
        denom = kappa * magp + norm_pm1
        scale = np.where(small | (denom <= 0.0), 0.0, norm_pm1 / np.where(denom > 0, denom, 1.0))
    else:
        denom = kappa * mag ** (p - 2.0) + norm_pm1
        scale = np.where(denom > 0.0, norm_pm1 / np.where(denom > 0, denom, 1.0), 0.0)
    return e1 * scale, e2 * scale


def _np_phom_root(e1, e2, kappa, p):
    # pointwise solve of kappa*s^(p-1) + s = |eta|, s in [0, |eta|], by bisection
    r = np.sqrt(e1 * e1 + e2 * e2)
    lo = np.zeros_like(r)
    hi = r.copy()
    for _ in range(80):
        s = 0.5 * (lo + hi)
        g = kappa * s ** (p - 1.0) + s - r
        high = g > 0.0
        hi = np.where(high, s, hi)
        lo = np.where(high, lo, s)
    s = 0.5 * (lo + hi)
    safe = np.where(r > 0.0, r, 1.0)
    scale = np.where(r > 0.0, s / safe, 0.0)
    return e1 * scale, e2 * scale


def _np_subgrad_min_phom2(g1, g2, alpha, beta, iters):
    # projected subgradient descent on sum_i alpha*|g_i - w_i| + beta/2*|w_i|^2
    # with the strongly-convex step 2/(beta*(k+2)) and weighted averaging;
    # iterates are projected onto |w_i| <= min(|g_i|, alpha/beta) which
    # contains the minimiser.
    rho = np.minimum(np.sqrt(g1 * g1 + g2 * g2), alpha / beta)
    w1 = np.zeros_like(g1)
    w2 = np.zeros_like(g2)
    a1 = np.zeros_like(g1)
    a2 = np.zeros_like(g2)
    for k in range(iters):
        d1 = w1 - g1
        d2 = w2 - g2
        mag = np.sqrt(d1 * d1 + d2 * d2)
        safe = np.where(mag > 0.0, mag, 1.0)
        s1 = np.where(mag > 0.0, d1 / safe, 0.0)
        s2 = np.where(mag > 0.0, d2 / safe, 0.0)
        step = 2.0 / (beta * (k + 2.0))
        w1 = w1 - step * (alpha * s1 + beta * w1)
        w2 = w2 - step * (alpha * s2 + beta * w2)
        wm = np.sqrt(w1 * w1 + w2 * w2)
        over = wm > rho
        if np.any(over):
            shrink_f = np.where(over, rho / np.where(wm > 0, wm, 1.0), 1.0)
            w1 = w1 * shrink_f
            w2 = w2 * shrink_f
        cw = 2.0 * (k + 1.0) / ((iters) * (iters + 1.0))
        a1 = a1 + cw * w1
        a2 = a2 + cw * w2
    return a1, a2


def _np_subgrad_min_onehom(g1, g2, alpha, beta, p, iters, step0):
    # projected subgradient descent on alpha*sum|g_i - w_i| + beta*||w||_p,
    # diminishing steps, best-iterate tracking; iterates are projected onto
    # the per-pixel discs |w_i| <= |g_i| which contain the minimiser.
    rho = np.sqrt(g1 * g1 + g2 * g2)
    w1 = np.zeros_like(g1)
    w2 = np.zeros_like(g2)
    best1 = w1.copy()
    best2 = w2.copy()

    def value(a, b):
        d = np.sqrt((g1 - a) ** 2 + (g2 - b) ** 2)
        nm = np.sqrt(a * a + b * b)
        return alpha * float(np.sum(d)) + beta * float(np.sum(nm**p)) ** (1.0 / p)

    fbest = value(w1, w2)
    for k in range(iters):
        d1 = w1 - g1
        d2 = w2 - g2
        mag = np.sqrt(d1 * d1 + d2 * d2)
        safe = np.where(mag > 0.0, mag, 1.0)
        s1 = np.where(mag > 0.0, d1 / safe, 0.0)
        s2 = np.where(mag > 0.0, d2 / safe, 0.0)
        wm = np.sqrt(w1 * w1 + w2 * w2)
        nrm = float(np.sum(wm**p)) ** ((p - 1.0) / p)
        if nrm > 0.0:
            t1 = wm ** (p - 2.0) * w1 if p >= 2.0 else np.where(wm > 0, wm ** (p - 2.0), 0.0) * w1
            t2 = wm ** (p - 2.0) * w2 if p >= 2.0 else np.where(wm > 0, wm ** (p - 2.0), 0.0) * w2
            s1 = alpha * s1 + beta * t1 / nrm
            s2 = alpha * s2 + beta * t2 / nrm
        else:
            s1 = alpha * s1
            s2 = alpha * s2
        step = step0 / math.sqrt(k + 1.0)
        w1 = w1 - step * s1
        w2 = w2 - step * s2
        wm = np.sqrt(w1 * w1 + w2 * w2)
        over = wm > rho
        if np.any(over):
            f = np.where(over, rho / np.where(wm > 0, wm, 1.0), 1.0)
            w1 = w1 * f
            w2 = w2 * f
        fk = value(w1, w2)
        if fk < fbest:
            fbest = fk
            best1 = w1.copy()
            best2 = w2.copy()
    return best1, best2


_NUMPY_IMPLS = {
    "gradient": _np_gradient,
    "divergence": _np_divergence,
    "shrink": _np_shrink,
    "lp_fp_sweep": _np_lp_fp_sweep,
    "phom_root": _np_phom_root,
    "subgrad_min_phom2": _np_subgrad_min_phom2,
    "subgrad_min_onehom": _np_subgrad_min_onehom,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def nb_gradient(u, t):
        n, m = u.shape
        g1 = np.zeros((n, m))
        g2 = np.zeros((n, m))
        for i in range(n - 1):
            for j in range(m):
                g1[i, j] = (u[i + 1, j] - u[i, j]) / t
        for i in range(n):
            for j in range(m - 1):
                g2[i, j] = (u[i, j + 1] - u[i, j]) / t
        return g1, g2

    @njit(cache=True)
    def nb_divergence(w1, w2, t):
        n, m = w1.shape
        out = np.zeros((n, m))
        if n > 1:
            for j in range(m):
                out[0, j] += w1[0, j]
                out[n - 1, j] += -w1[n - 2, j]
            for i in range(1, n - 1):
                for j in range(m):
                    out[i, j] += w1[i, j] - w1[i - 1, j]
        if m > 1:
            for i in range(n):
                out[i, 0] += w2[i, 0]
                out[i, m - 1] += -w2[i, m - 2]
            for i in range(n):
                for j in range(1, m - 1):
                    out[i, j] += w2[i, j] - w2[i, j - 1]
        for i in range(n):
            for j in range(m):
                out[i, j] /= t
        return out

    @njit(cache=True)
    def nb_shrink(g1, g2, thr):
        n, m = g1.shape
        z1 = np.zeros((n, m))
        z2 = np.zeros((n, m))
        for i in range(n):
            for j in range(m):
                mag = math.sqrt(g1[i, j] * g1[i, j] + g2[i, j] * g2[i, j])
                if mag > thr:
                    sc = (mag - thr) / mag
                    z1[i, j] = g1[i, j] * sc
                    z2[i, j] = g2[i, j] * sc
        return z1, z2

    @njit(cache=True)
    def nb_lp_fp_sweep(w1, w2, e1, e2, kappa, p):
        n, m = w1.shape
        acc = 0.0
        for i in range(n):
            for j in range(m):
                mag = math.sqrt(w1[i, j] * w1[i, j] + w2[i, j] * w2[i, j])
                acc += mag**p
        norm_pm1 = acc ** ((p - 1.0) / p)
        o1 = np.zeros((n, m))
        o2 = np.zeros((n, m))
        for i in range(n):
            for j in range(m):
                mag = math.sqrt(w1[i, j] * w1[i, j] + w2[i, j] * w2[i, j])
                if p < 2.0 and mag < 1e-14:
                    continue
                denom = kappa * mag ** (p - 2.0) + norm_pm1
                if denom > 0.0:
                    sc = norm_pm1 / denom
                    o1[i, j] = e1[i, j] * sc
                    o2[i, j] = e2[i, j] * sc
        return o1, o2

    @njit(cache=True)
    def nb_phom_root(e1, e2, kappa, p):
        n, m = e1.shape
        o1 = np.zeros((n, m))
        o2 = np.zeros((n, m))
        for i in range(n):
            for j in range(m):
                r = math.sqrt(e1[i, j] * e1[i, j] + e2[i, j] * e2[i, j])
                if r <= 0.0:
                    continue
                lo = 0.0
                hi = r
                for _ in range(80):
                    s = 0.5 * (lo + hi)
                    g = kappa * s ** (p - 1.0) + s - r
                    if g > 0.0:
                        hi = s
                    else:
                        lo = s
                s = 0.5 * (lo + hi)
                sc = s / r
                o1[i, j] = e1[i, j] * sc
                o2[i, j] = e2[i, j] * sc
        return o1, o2

    @njit(cache=True)
    def nb_subgrad_min_phom2(g1, g2, alpha, beta, iters):
        n, m = g1.shape
        w1 = np.zeros((n, m))
        w2 = np.zeros((n, m))
        a1 = np.zeros((n, m))
        a2 = np.zeros((n, m))
        cap = alpha / beta
        for k in range(iters):
            step = 2.0 / (beta * (k + 2.0))
            cw = 2.0 * (k + 1.0) / (iters * (iters + 1.0))
            for i in range(n):
                for j in range(m):
                    d1 = w1[i, j] - g1[i, j]
                    d2 = w2[i, j] - g2[i, j]
                    mag = math.sqrt(d1 * d1 + d2 * d2)
                    s1 = d1 / mag if mag > 0.0 else 0.0
                    s2 = d2 / mag if mag > 0.0 else 0.0
                    v1 = w1[i, j] - step * (alpha * s1 + beta * w1[i, j])
                    v2 = w2[i, j] - step * (alpha * s2 + beta * w2[i, j])
                    gm = math.sqrt(g1[i, j] * g1[i, j] + g2[i, j] * g2[i, j])
                    rho = gm if gm < cap else cap
                    vm = math.sqrt(v1 * v1 + v2 * v2)
                    if vm > rho and vm > 0.0:
                        v1 *= rho / vm
                        v2 *= rho / vm
                    w1[i, j] = v1
                    w2[i, j] = v2
                    a1[i, j] += cw * v1
                    a2[i, j] += cw * v2
        return a1, a2

    @njit(cache=True)
    def nb_subgrad_min_onehom(g1, g2, alpha, beta, p, iters, step0):
        n, m = g1.shape
        w1 = np.zeros((n, m))
        w2 = np.zeros((n, m))
        b1 = np.zeros((n, m))
        b2 = np.zeros((n, m))
        fbest = 0.0
        for i in range(n):
            for j in range(m):
                fbest += alpha * math.sqrt(g1[i, j] ** 2 + g2[i, j] ** 2)
        for k in range(iters):
            acc = 0.0
            for i in range(n):
                for j in range(m):
                    acc += math.sqrt(w1[i, j] ** 2 + w2[i, j] ** 2) ** p
            nrm = acc ** ((p - 1.0) / p)
            step = step0 / math.sqrt(k + 1.0)
            fk = 0.0
            for i in range(n):
                for j in range(m):
                    d1 = w1[i, j] - g1[i, j]
                    d2 = w2[i, j] - g2[i, j]
                    mag = math.sqrt(d1 * d1 + d2 * d2)
                    s1 = d1 / mag if mag > 0.0 else 0.0
                    s2 = d2 / mag if mag > 0.0 else 0.0
                    wm = math.sqrt(w1[i, j] ** 2 + w2[i, j] ** 2)
                    if nrm > 0.0 and wm > 0.0:
                        s1 = alpha * s1 + beta * wm ** (p - 2.0) * w1[i, j] / nrm
                        s2 = alpha * s2 + beta * wm ** (p - 2.0) * w2[i, j] / nrm
                    else:
                        s1 = alpha * s1
                        s2 = alpha * s2
                    v1 = w1[i, j] - step * s1
                    v2 = w2[i, j] - step * s2
                    rho = math.sqrt(g1[i, j] ** 2 + g2[i, j] ** 2)
                    vm = math.sqrt(v1 * v1 + v2 * v2)
                    if vm > rho and vm > 0.0:
                        v1 *= rho / vm
                        v2 *= rho / vm
                    w1[i, j] = v1
                    w2[i, j] = v2
            acc = 0.0
            fk = 0.0
            for i in range(n):
                for j in range(m):
                    fk += alpha * math.sqrt((g1[i, j] - w1[i, j]) ** 2 + (g2[i, j] - w2[i, j]) ** 2)
                    acc += math.sqrt(w1[i, j] ** 2 + w2[i, j] ** 2) ** p
            fk += beta * acc ** (1.0 / p)
            if fk < fbest:
                fbest = fk
                for i in range(n):
                    for j in range(m):
                        b1[i, j] = w1[i, j]
                        b2[i, j] = w2[i, j]
        return b1, b2

    return {
        "gradient": nb_gradient,
        "divergence": nb_divergence,
        "shrink": nb_shrink,
        "lp_fp_sweep": nb_lp_fp_sweep,
        "phom_root": nb_phom_root,
        "subgrad_min_phom2": nb_subgrad_min_phom2,
        "subgrad_min_onehom": nb_subgrad_min_onehom,
    }


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_request = _read_backend_request()
_impls = None
BACKEND = "numpy"

if _request in ("auto", "numba"):
    try:
        _impls = _build_numba_impls()
        BACKEND = "numba"
    except ImportError:
        if _request == "numba":
            raise
if _impls is None:
    _impls = _NUMPY_IMPLS

gradient = _impls["gradient"]
divergence = _impls["divergence"]
shrink = _impls["shrink"]
lp_fp_sweep = _impls["lp_fp_sweep"]
phom_root = _impls["phom_root"]
subgrad_min_phom2 = _impls["subgrad_min_phom2"]
subgrad_min_onehom = _impls["subgrad_min_onehom"]


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return BACKEND


def numpy_impls() -> dict:
    """The pure-numpy kernel set (always available; used by the benchmark)."""
    return dict(_NUMPY_IMPLS)


def numba_impls() -> dict | None:
    """The jitted kernel set, or None when numba is unavailable."""
    try:
        return _build_numba_impls()
    except ImportError:
        return None
