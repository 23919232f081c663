"""Log-scale renormalized coordinates.

A nonzero value ``g`` at level ``N`` is stored as ``r = -2**-N * log|g|`` and
``alpha = g/|g|``. Zero is ``(+inf, 1)``.
"""

from __future__ import annotations

import decimal
import math
from typing import NamedTuple

import numpy as np
from numba import njit

INF = math.inf
EXP_CLAMP = 700.0


class RenCoeff(NamedTuple):
    r: float
    alpha: complex


@njit(cache=True)
def _ren_sum(r1, a1, r2, a2, p):
    if r1 == np.inf and r2 == np.inf:
        return np.inf, 1.0 + 0.0j
    delta = r2 - r1
    if delta >= 0:
        t = a1 + a2 * np.exp(-p * delta)
        base = r1
    else:
        t = a2 + a1 * np.exp(p * delta)
        base = r2
    at = abs(t)
    if at == 0.0:
        return np.inf, 1.0 + 0.0j
    return base - np.log(at) / p, t / at


# Double-length radial parts. ``r`` alone has absolute precision eps*|r|,
# i.e. relative precision 2**N*|r|*eps on the value it encodes; cancellation
# in a Graeffe step amplifies that. Carrying ``r_lo`` with ``r + r_lo`` exact
# to about eps absolute restores plain floating-point relative accuracy.


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _dd_add(ah, al, bh, bl):
    if ah == np.inf or bh == np.inf:
        return np.inf, 0.0
    s, e = _two_sum(ah, bh)
    e += al + bl
    return _two_sum(s, e)


@njit(cache=True)
def _ren_sum_dd(r1, l1, a1, r2, l2, a2, p):
    """:func:`_ren_sum` on double-length radial parts ``r + l``."""
    if r1 == np.inf and r2 == np.inf:
        return np.inf, 0.0, 1.0 + 0.0j
    if r2 == np.inf:
        return r1, l1, a1
    if r1 == np.inf:
        return r2, l2, a2
    delta = (r2 - r1) + (l2 - l1)
    if delta >= 0:
        t = a1 + a2 * np.exp(-p * delta)
        bh, bl = r1, l1
    else:
        t = a2 + a1 * np.exp(p * delta)
        bh, bl = r2, l2
    at = abs(t)
    if at == 0.0:
        return np.inf, 0.0, 1.0 + 0.0j
    rh, rl = _dd_add(bh, bl, -np.log(at) / p, 0.0)
    return rh, rl, t / at


def neg_log_dd(x: float) -> tuple[float, float]:
    """``-log(x)`` as an unevaluated sum ``hi + lo``."""
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        v = -decimal.Decimal(x).ln()
        hi = float(v)
        return hi, float(v - decimal.Decimal(hi))


def _phase(c, a):
    """``c / |c|`` after an exact power-of-two prescale by ``a ~ |c|``.

    Dividing by a subnormal modulus directly overflows or loses the phase.
    """
    e = -np.frexp(a)[1]
    cs = np.ldexp(c.real, e) + 1j * np.ldexp(c.imag, e)
    return cs / np.abs(cs)


def to_renorm(c) -> RenCoeff:
    c = complex(c)
    a = abs(c)
    if a == 0:
        return RenCoeff(INF, 1 + 0j)
    return RenCoeff(-math.log(a), complex(_phase(c, a)))


def to_renorm_array(coeffs) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of :func:`to_renorm`: returns ``(r, alpha)`` arrays."""
    c = np.asarray(coeffs, dtype=complex)
    a = np.abs(c)
    nz = a > 0
    r = np.full(c.shape, INF)
    alpha = np.ones(c.shape, dtype=complex)
    r[nz] = -np.log(a[nz])
    alpha[nz] = _phase(c[nz], a[nz])
    return r, alpha


def to_renorm_array_dd(coeffs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Like :func:`to_renorm_array`, also returning the low parts of ``r``."""
    r, alpha = to_renorm_array(coeffs)
    lo = np.zeros(r.shape)
    for k, a in enumerate(np.abs(np.asarray(coeffs, dtype=complex))):
        if a > 0:
            r[k], lo[k] = neg_log_dd(float(a))
    return r, lo, alpha


def from_renorm(rc, p: float = 1.0, *, with_flag: bool = False):
    """Inverse coordinate map ``alpha * exp(-p r)``.

    The exponent is clamped to [-700, 700]; with ``with_flag`` the result is
    returned as ``(value, clamped)``.
    """
    r, alpha = rc
    if r == INF:
        return (0j, False) if with_flag else 0j
    e = -p * r
    clamped = abs(e) > EXP_CLAMP
    if clamped:
        e = math.copysign(EXP_CLAMP, e)
    val = complex(alpha) * math.exp(e)
    return (val, clamped) if with_flag else val


def ren_sum(r1, alpha1, r2, alpha2, p: float) -> RenCoeff:
    """Renormalized sum of ``alpha1 e^{-p r1}`` and ``alpha2 e^{-p r2}``."""
    r, a = _ren_sum(float(r1), complex(alpha1), float(r2), complex(alpha2), float(p))
    return RenCoeff(r, a)


def ren_prod(a: RenCoeff, b: RenCoeff) -> RenCoeff:
    if a.r == INF or b.r == INF:
        return RenCoeff(INF, 1 + 0j)
    t = complex(a.alpha) * complex(b.alpha)
    return RenCoeff(a.r + b.r, t / abs(t))
