"""Graeffe and tangent Graeffe steps, classical and renormalized."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .poly import Polynomial
from .renorm import RenCoeff, _dd_add, _ren_sum_dd, to_renorm_array_dd

LOG2 = math.log(2.0)
LOG2_LO = 2.3190468138462996e-17


class ClassicalOverflowError(ArithmeticError):
    """A classical Graeffe coefficient left the binary64 range."""


def _alternate(c: np.ndarray) -> np.ndarray:
    """Coefficients of ``f(-x)``."""
    s = np.ones(c.size)
    s[1::2] = -1.0
    return c * s


def _even_part(c: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros(d + 1, dtype=complex)
    ev = c[::2]
    out[: min(ev.size, d + 1)] = ev[: d + 1]
    return out


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ClassicalOverflowError("classical overflow")


def graeffe_classical(p: Polynomial) -> Polynomial:
    """One root-squaring step ``(-1)^d f(sqrt x) f(-sqrt x)`` on raw coefficients."""
    d = p.degree
    if d < 1:
        raise ValueError("degree must be >= 1")
    f = p.coeffs
    with np.errstate(over="ignore", invalid="ignore"):
        g = (-1) ** d * _even_part(np.convolve(f, _alternate(f)), d)
    _check_finite(g)
    return Polynomial(g, p.is_real)


def tangent_graeffe_classical(f: Polynomial, fdot) -> tuple[Polynomial, np.ndarray]:
    """Graeffe step on the 1-jet ``f + eps*fdot``.

    ``fdot`` is a coefficient array (or Polynomial) of degree at most ``d``;
    the tangent of the result is returned as a length ``d+1`` array, since it
    may vanish identically.
    """
    d = f.degree
    fd = np.asarray(fdot.coeffs if isinstance(fdot, Polynomial) else fdot, dtype=complex)
    if fd.size > d + 1:
        if np.any(fd[d + 1 :] != 0):
            raise ValueError("tangent degree exceeds base degree")
        fd = fd[: d + 1]
    fd = np.concatenate([fd, np.zeros(d + 1 - fd.size, dtype=complex)])
    g = graeffe_classical(f)
    c = f.coeffs
    with np.errstate(over="ignore", invalid="ignore"):
        gd = np.convolve(c, _alternate(fd)) + np.convolve(_alternate(c), fd)
        gd = (-1) ** d * _even_part(gd, d)
    _check_finite(gd)
    return g, gd


@dataclass(frozen=True, eq=False)
class RenJet:
    """Renormalized 1-jet at level ``level``.

    ``r, alpha`` encode the base polynomial and ``rhat, alphahat`` its tangent,
    coefficient ``i`` being ``alpha_i * exp(-2**level * r_i)``. ``r_lo`` and
    ``rhat_lo`` hold low-order corrections (``r + r_lo`` is the radial part
    to double length); they default to zero.
    """

    level: int
    degree: int
    r: np.ndarray
    alpha: np.ndarray
    rhat: np.ndarray
    alphahat: np.ndarray
    r_lo: np.ndarray | None = None
    rhat_lo: np.ndarray | None = None

    def __post_init__(self):
        for name in ("r_lo", "rhat_lo"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, np.zeros(self.degree + 1))

    @property
    def base(self) -> list[RenCoeff]:
        return [RenCoeff(float(a), complex(b)) for a, b in zip(self.r, self.alpha)]

    @property
    def tangent(self) -> list[RenCoeff]:
        return [RenCoeff(float(a), complex(b)) for a, b in zip(self.rhat, self.alphahat)]

    def base_coeffs(self) -> np.ndarray:
        """Base coefficients at level scale; overflows for large levels."""
        return _decode(self.r, self.alpha, 2.0**self.level)

    def tangent_coeffs(self) -> np.ndarray:
        return _decode(self.rhat, self.alphahat, 2.0**self.level)


def _decode(r, alpha, p):
    with np.errstate(over="ignore"):
        return np.where(np.isinf(r), 0j, alpha * np.exp(-p * np.where(np.isinf(r), 0.0, r)))


def init_jet(p: Polynomial) -> RenJet:
    """Level-0 jet of ``p + eps*p'``."""
    d = p.degree
    if d < 1:
        raise ValueError("degree must be >= 1")
    if p.coeffs[0] == 0:
        raise ValueError("p(0) == 0; deflate zero roots first")
    r, r_lo, alpha = to_renorm_array_dd(p.coeffs)
    fprime = np.zeros(d + 1, dtype=complex)
    fprime[:d] = np.arange(1, d + 1) * p.coeffs[1:]
    rhat, rhat_lo, alphahat = to_renorm_array_dd(fprime)
    return RenJet(0, d, r, alpha, rhat, alphahat, r_lo, rhat_lo)


@njit(cache=True)
def _mid(ah, al, bh, bl, sh, sl):
    """``(a + b)/2 - shift`` in double length."""
    mh, ml = _dd_add(ah, al, bh, bl)
    return _dd_add(0.5 * mh, 0.5 * ml, -sh, -sl)


@njit(cache=True)
def _tangent_step(level, d, r, rl, alpha, rhat, rhl, alphahat):
    p = 2.0 ** (level + 1)
    shh, shl = LOG2 / p, LOG2_LO / p
    sd = 1.0 if d % 2 == 0 else -1.0
    s = np.empty(d + 1)
    sl = np.empty(d + 1)
    beta = np.empty(d + 1, dtype=np.complex128)
    sh = np.empty(d + 1)
    shl_ = np.empty(d + 1)
    bh = np.empty(d + 1, dtype=np.complex128)
    for i in range(d + 1):
        sg = sd if i % 2 == 0 else -sd
        si, sli = r[i], rl[i]
        b = sg * alpha[i] * alpha[i]
        b = b / abs(b)
        shi, shli = _mid(r[i], rl[i], rhat[i], rhl[i], shh, shl)
        bhi = sg * alpha[i] * alphahat[i]
        bhi = bhi / abs(bhi)
        for j in range(1, min(d - i, i) + 1):
            sgj = sg if j % 2 == 0 else -sg
            th, tl = _mid(r[i + j], rl[i + j], r[i - j], rl[i - j], shh, shl)
            si, sli, b = _ren_sum_dd(si, sli, b, th, tl, sgj * alpha[i + j] * alpha[i - j], p)
            th, tl = _mid(r[i + j], rl[i + j], rhat[i - j], rhl[i - j], shh, shl)
            shi, shli, bhi = _ren_sum_dd(shi, shli, bhi, th, tl,
                                         sgj * alpha[i + j] * alphahat[i - j], p)
            th, tl = _mid(r[i - j], rl[i - j], rhat[i + j], rhl[i + j], shh, shl)
            shi, shli, bhi = _ren_sum_dd(shi, shli, bhi, th, tl,
                                         sgj * alpha[i - j] * alphahat[i + j], p)
        s[i], sl[i], beta[i] = si, sli, b
        sh[i], shl_[i], bh[i] = shi, shli, bhi
    return s, sl, beta, sh, shl_, bh


def tangent_graeffe_renorm(jet: RenJet) -> RenJet:
    """One tangent Graeffe step in renormalized coordinates (level N -> N+1)."""
    s, sl, beta, sh, shl, bh = _tangent_step(
        jet.level, jet.degree, jet.r, jet.r_lo, jet.alpha, jet.rhat, jet.rhat_lo, jet.alphahat
    )
    return RenJet(jet.level + 1, jet.degree, s, beta, sh, bh, sl, shl)
