"""Real-backend inner loops.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorized numpy twin. The numba build is used unless ``GHR_DISABLE_NUMBA`` is
set to a truthy value or numba cannot be imported. Both sets are reachable
through :data:`NUMPY` and :func:`numba_kernels` so tests and the benchmark can
compare them directly.
"""
from __future__ import annotations

import os
from functools import lru_cache
from types import SimpleNamespace

import numpy as np


def _disabled_by_env() -> bool:
    return os.environ.get("GHR_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# loop implementations (numba targets)
# ---------------------------------------------------------------------------

def _lu_det_loops(a):
    a = a.copy()
    n = a.shape[0]
    det = 1.0
    for j in range(n):
        p = j
        big = abs(a[j, j])
        for i in range(j + 1, n):
            if abs(a[i, j]) > big:
                big = abs(a[i, j])
                p = i
        if big == 0.0:
            return 0.0
        if p != j:
            for c in range(n):
                tmp = a[j, c]
                a[j, c] = a[p, c]
                a[p, c] = tmp
            det = -det
        piv = a[j, j]
        det *= piv
        for i in range(j + 1, n):
            f = a[i, j] / piv
            if f != 0.0:
                for c in range(j, n):
                    a[i, c] -= f * a[j, c]
    return det


def _mgs_reorth_loops(x, thresholds):
    m, d = x.shape
    psi = np.zeros((m, d))
    proj = np.zeros((m, m))
    norms = np.zeros(m)
    for i in range(m):
        v = x[i].copy()
        for _ in range(2):
            for j in range(i):
                s = 0.0
                for t in range(d):
                    s += v[t] * psi[j, t]
                c = s / norms[j]
                proj[i, j] += c
                for t in range(d):
                    v[t] -= c * psi[j, t]
        nv = 0.0
        for t in range(d):
            nv += v[t] * v[t]
        psi[i] = v
        norms[i] = nv
        if nv <= thresholds[i]:
            return psi, proj, norms, i
    return psi, proj, norms, m


def _spectral_moments_loops(levels, probs, order):
    mean = 0.0
    for i in range(levels.shape[0]):
        mean += probs[i] * levels[i]
    mu = np.zeros(order + 1)
    for i in range(levels.shape[0]):
        dev = levels[i] - mean
        w = probs[i]
        for n in range(order + 1):
            mu[n] += w
            w *= dev
    return mean, mu


def _cumulants_to_central_loops(kappa, binom, order):
    # kappa[r] is the r-th cumulant; kappa[0], kappa[1] are ignored
    mu = np.zeros(order + 1)
    mu[0] = 1.0
    for n in range(2, order + 1):
        s = 0.0
        for j in range(2, n + 1):
            s += binom[n - 1, j - 1] * kappa[j] * mu[n - j]
        mu[n] = s
    return mu


# ---------------------------------------------------------------------------
# numpy twins
# ---------------------------------------------------------------------------

def _lu_det_numpy(a):
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    det = 1.0
    for j in range(n):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if a[p, j] == 0.0:
            return 0.0
        if p != j:
            a[[j, p]] = a[[p, j]]
            det = -det
        det *= a[j, j]
        a[j + 1:, j:] -= np.outer(a[j + 1:, j] / a[j, j], a[j, j:])
    return det


def _mgs_reorth_numpy(x, thresholds):
    m, d = x.shape
    psi = np.zeros((m, d))
    proj = np.zeros((m, m))
    norms = np.zeros(m)
    for i in range(m):
        v = x[i].copy()
        for _ in range(2):
            for j in range(i):
                c = (v @ psi[j]) / norms[j]
                proj[i, j] += c
                v -= c * psi[j]
        nv = v @ v
        psi[i] = v
        norms[i] = nv
        if nv <= thresholds[i]:
            return psi, proj, norms, i
    return psi, proj, norms, m


def _spectral_moments_numpy(levels, probs, order):
    mean = probs @ levels
    dev = levels - mean
    return mean, np.vander(dev, order + 1, increasing=True).T @ probs


def _cumulants_to_central_numpy(kappa, binom, order):
    mu = np.zeros(order + 1)
    mu[0] = 1.0
    for n in range(2, order + 1):
        j = np.arange(2, n + 1)
        mu[n] = np.sum(binom[n - 1, j - 1] * kappa[j] * mu[n - j])
    return mu


NUMPY = SimpleNamespace(
    name="numpy",
    lu_det=_lu_det_numpy,
    mgs_reorth=_mgs_reorth_numpy,
    spectral_moments=_spectral_moments_numpy,
    cumulants_to_central=_cumulants_to_central_numpy,
)


@lru_cache(maxsize=None)
def numba_kernels():
    """The jitted kernel set, or None when numba is unavailable."""
    try:
        import numba
    except ImportError:
        return None
    jit = numba.njit(cache=True)
    return SimpleNamespace(
        name="numba",
        lu_det=jit(_lu_det_loops),
        mgs_reorth=jit(_mgs_reorth_loops),
        spectral_moments=jit(_spectral_moments_loops),
        cumulants_to_central=jit(_cumulants_to_central_loops),
    )


def active():
    """Kernel set selected by the environment."""
    if not _disabled_by_env():
        kernels = numba_kernels()
        if kernels is not None:
            return kernels
    return NUMPY


def lu_det(a) -> float:
    """Determinant by partially pivoted Gaussian elimination."""
    return float(active().lu_det(np.ascontiguousarray(a, dtype=np.float64)))


def mgs_reorth(x, thresholds):
    """Modified Gram-Schmidt with one full reorthogonalization pass.

    Rows of ``x`` are orthogonalized in order. Returns ``(psi, proj, norms,
    count)``: the orthogonal rows, the accumulated projection coefficients
    ``proj[i, j]`` of row ``i`` on ``psi[j]``, squared norms, and the number
    of rows kept. Processing stops at the first row whose squared norm falls
    to or below its threshold; that row's ``proj`` and ``norms`` entries are
    still filled.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    psi, proj, norms, count = active().mgs_reorth(x, thresholds)
    return psi, proj, norms, int(count)


def spectral_moments(levels, probs, order: int):
    """Mean and central moments 0..order of a discrete distribution."""
    levels = np.ascontiguousarray(levels, dtype=np.float64)
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    mean, mu = active().spectral_moments(levels, probs, int(order))
    return float(mean), mu


@lru_cache(maxsize=32)
def _binomials(order: int) -> np.ndarray:
    from math import comb

    return np.array([[comb(n, k) for k in range(order + 1)] for n in range(order + 1)], dtype=np.float64)


def cumulants_to_central(kappa, order: int) -> np.ndarray:
    """Central moments from cumulants; ``kappa[r]`` holds the r-th cumulant."""
    kappa = np.ascontiguousarray(kappa, dtype=np.float64)
    return active().cumulants_to_central(kappa, _binomials(int(order)), int(order))
