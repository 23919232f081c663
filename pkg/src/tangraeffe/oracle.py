"""Aberth-Ehrlich reference solver and root-set matching, for tests and benchmarks.

Nothing here is used by the solver itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .poly import Polynomial, derivative, eval_poly

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class OracleResult:
    roots: np.ndarray
    converged: bool
    iterations: int
    max_correction: float


def _newton_ratio(p: Polynomial, dp: Polynomial, rev: Polynomial, drev: Polynomial, z):
    """``p(z)/p'(z)``, through the reversed polynomial outside the unit disk."""
    d = p.degree
    out = np.empty(z.shape, dtype=complex)
    inner = np.abs(z) <= 1
    zi = z[inner]
    out[inner] = eval_poly(p, zi) / eval_poly(dp, zi)
    zo = z[~inner]
    y = 1 / zo
    ry = eval_poly(rev, y)
    out[~inner] = zo * ry / (d * ry - y * eval_poly(drev, y))
    return out


def aberth_roots(p: Polynomial, tol: float = 1e-13, max_iter: int = 1000) -> OracleResult:
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Zero roots are split off first. Starting points lie on the circle of
    radius ``|f_0/f_d|**(1/d)`` at golden-angle spacing. A root is frozen once
    its correction drops below ``tol`` relative to its modulus, or once its
    backward error reaches rounding level (``4*eps``).
    """
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    c = p.coeffs
    k = int(np.flatnonzero(c)[0])
    zeros = np.zeros(k, dtype=complex)
    if k == p.degree:
        return OracleResult(zeros, True, 0, 0.0)
    q = Polynomial(c[k:], p.is_real)
    d = q.degree
    dq = derivative(q)
    rev = Polynomial(q.coeffs[::-1], q.is_real)
    drev = derivative(rev) if d > 0 else rev
    radius = abs(q.coeffs[0] / q.coeffs[-1]) ** (1.0 / d)
    z = radius * np.exp(1j * (GOLDEN_ANGLE * np.arange(d) + 0.25))
    absq = Polynomial(np.abs(q.coeffs))
    noise = 4 * np.finfo(float).eps
    active = np.ones(d, dtype=bool)
    corr = np.full(d, np.inf)
    it = 0
    with np.errstate(all="ignore"):
        while it < max_iter and active.any():
            it += 1
            idx = np.flatnonzero(active)
            ratio = _newton_ratio(q, dq, rev, drev, z[idx])
            diff = z[idx, None] - z[None, :]
            diff[np.arange(idx.size), idx] = np.inf
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
            w = np.where(np.isfinite(w), w, 0.0)
            z[idx] -= w
            corr[idx] = np.abs(w) / np.maximum(np.abs(z[idx]), 1e-300)
            resid = np.abs(eval_poly(q, z[idx])) / eval_poly(absq, np.abs(z[idx])).real
            active[idx] = (corr[idx] >= tol) & ~(resid <= noise)
    max_corr = float(np.max(corr))
    return OracleResult(np.concatenate([zeros, z]), not active.any(), it, max_corr)


def _rel_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(a)[:, None], np.abs(b)[None, :]), 1e-300)
    return np.abs(a[:, None] - b[None, :]) / scale


def match_rootsets(a, b) -> float:
    """Bottleneck matching distance between two root multisets.

    Returns the minimum over one-to-one pairings of the largest relative
    distance ``|x - y| / max(|x|, |y|)``. Exact: binary search over the
    candidate distances with a perfect-matching test at each threshold.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    dist = _rel_dist(a, b)
    cand = np.unique(dist)
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect(dist <= cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def _perfect(adj: np.ndarray) -> bool:
    match = maximum_bipartite_matching(csr_matrix(adj), perm_type="column")
    return bool(np.all(match >= 0))
