"""Dense univariate polynomials: evaluation, preprocessing and test generators.

Coefficients are stored low-to-high, ``coeffs[i]`` multiplying ``x**i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

MACHEPS = np.finfo(float).eps


class PolyFormatError(ValueError):
    """Malformed polynomial text input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateThetaError(ValueError):
    """The conformal transform annihilated an extreme coefficient."""


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial with exact degree (nonzero leading coefficient)."""

    coeffs: np.ndarray
    is_real: bool

    def __init__(self, coeffs, is_real: bool | None = None):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0 or not np.any(c != 0):
            raise ValueError("zero polynomial")
        c = c[: np.flatnonzero(c)[-1] + 1].copy()
        real_coeffs = bool(np.all(c.imag == 0))
        if is_real is None:
            is_real = real_coeffs
        elif is_real and not real_coeffs:
            raise ValueError("is_real set but coefficients have imaginary parts")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "is_real", bool(is_real))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return eval_poly(self, x)

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"Polynomial({self.coeffs.tolist()!r}, {kind})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def scaled(self, c) -> Polynomial:
        return Polynomial(self.coeffs * c, self.is_real and np.imag(c) == 0)


def eval_poly(p: Polynomial, x):
    """Horner evaluation; works elementwise on arrays."""
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for c in p.coeffs[::-1]:
            acc = acc * x + c
    return acc[()] if acc.ndim == 0 else acc


def derivative(p: Polynomial) -> Polynomial:
    if p.degree < 1:
        raise ValueError("constant polynomial")
    k = np.arange(1, p.degree + 1)
    return Polynomial(k * p.coeffs[1:], p.is_real)


def deflate_zero_roots(p: Polynomial) -> tuple[Polynomial, int]:
    """Strip the factor ``x**k``; returns the cofactor and ``k``."""
    nz = np.flatnonzero(np.abs(p.coeffs) > 0)
    if nz.size == 0:
        raise ValueError("zero polynomial")
    k = int(nz[0])
    return Polynomial(p.coeffs[k:], p.is_real), k


def _mobius_cs(theta: float) -> tuple[float, float]:
    if not math.isfinite(theta) or not (-math.pi < theta <= math.pi):
        raise ValueError(f"theta must lie in (-pi, pi], got {theta!r}")
    if theta == 0.0:
        return 1.0, 0.0
    return math.cos(theta), math.sin(theta)


def _dyadic(values) -> tuple[list[int], int]:
    """Exact integer numerators over a common power-of-two denominator."""
    ratios = [float(v).as_integer_ratio() for v in values]
    den = max(q for _, q in ratios)
    return [n * (den // q) for n, q in ratios], den


def _int_to_float(n: int, den: int) -> float:
    return n / den if n else 0.0


def mobius_transform(p: Polynomial, theta: float) -> Polynomial:
    """Return ``(x sin t + cos t)**d * p((x cos t - sin t)/(x sin t + cos t))``.

    Evaluated exactly in integer arithmetic (every binary64 is a dyadic
    rational) by the homogeneous Horner scheme
    ``h <- h*(c x - s) + f_k (s x + c)**(d-k)``, O(d^2) operations, then
    rounded once. Raises DegenerateThetaError when an extreme coefficient of
    the result is below ``1e3*eps`` of the magnitude it was formed from.
    """
    c, s = _mobius_cs(theta)
    if s == 0.0 and c == 1.0:
        return p
    d = p.degree
    (ci, si), den_cs = _dyadic([c, s])
    parts = [p.coeffs.real] if p.is_real else [p.coeffs.real, p.coeffs.imag]
    out = []
    for part in parts:
        f, den_f = _dyadic(part)
        h = [f[d]]
        basis = [1]
        for k in range(d - 1, -1, -1):
            basis = [a * ci + b * si for a, b in zip(basis + [0], [0] + basis)]
            h = [a * -si + b * ci for a, b in zip(h + [0], [0] + h)]
            fk = f[k]
            if fk:
                h = [a + fk * b for a, b in zip(h, basis)]
        total_den = den_f * den_cs**d
        shift = max(0, max(abs(v).bit_length() for v in h) - total_den.bit_length() - 1000)
        out.append(np.array([_int_to_float(v >> shift if v >= 0 else -((-v) >> shift), total_den) for v in h]))
    coeffs = out[0] if p.is_real else out[0] + 1j * out[1]
    k = np.arange(d + 1)
    with np.errstate(divide="ignore"):
        logf = np.log(np.abs(p.coeffs))
        ls, lc = np.log(abs(s)), np.log(abs(c))
        bound_lo = logsumexp(logf + k * ls + (d - k) * lc)
        bound_hi = logsumexp(logf + k * lc + (d - k) * ls)
        lo, hi = np.log(abs(coeffs[0])), np.log(abs(coeffs[-1]))
    cut = np.log(1e3 * MACHEPS)
    if lo - bound_lo <= cut or hi - bound_hi <= cut:
        raise DegenerateThetaError("degenerate theta, retry")
    return Polynomial(coeffs, p.is_real)


def mobius_pullback(root, theta: float):
    """Map a root of the transformed polynomial back to the original frame."""
    c, s = _mobius_cs(theta)
    den = root * s + c
    if abs(den) < 1e-300:
        raise ZeroDivisionError("root at pole")
    return (root * c - s) / den


def _sqrt_int(n: int) -> float:
    # binomials past ~1e308 still have square roots in range
    if n.bit_length() <= 1000:
        return math.sqrt(float(n))
    half = 0.5 * math.log(n)
    return math.exp(half) if half < 709.7 else math.inf


def gen_kostlan(d: int, seed: int, real: bool = True) -> Polynomial:
    """Random polynomial with coefficients ``a_i * sqrt(binom(d, i))``."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    rng = np.random.default_rng(seed)
    w = np.array([_sqrt_int(math.comb(d, i)) for i in range(d + 1)])
    if not np.all(np.isfinite(w)):
        raise ValueError(f"degree {d} too large: weights overflow binary64")
    if real:
        a = rng.standard_normal(d + 1)
    else:
        a = (rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)) / math.sqrt(2)
    return Polynomial(a * w, real)


def _from_roots(roots) -> np.ndarray:
    c = np.ones(1)
    for z in roots:
        c = np.convolve(c, [-z, 1.0])
    return c


def gen_perfidious(d: int) -> Polynomial:
    """Wilkinson's polynomial (x-1)(x-2)...(x-d)."""
    if not 1 <= d <= 25:
        raise ValueError("degree must be in 1..25")
    return Polynomial(_from_roots(np.arange(1, d + 1, dtype=float)), True)


def chebyshev_roots(d: int) -> np.ndarray:
    m = np.arange(d)
    return np.cos(np.pi / (2 * d) + np.pi * m / d)


def gen_chebyshev(d: int) -> Polynomial:
    """Monic Chebyshev polynomial of the first kind, ``T_d / 2**(d-1)``.

    Expanded by the three-term recurrence, whose integer coefficients are
    exact in binary64 up to d = 52 or so; the result has the roots of
    :func:`chebyshev_roots`. Multiplying out rounded linear factors instead
    perturbs the roots far beyond rounding level (index error ~1e-2 at d=30).
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    c = np.polynomial.chebyshev.cheb2poly([0] * d + [1])
    return Polynomial(np.ldexp(c, 1 - d), True)


def backward_error(p: Polynomial, z) -> float:
    """Relative residual ``|p(z)| / sum |f_i| |z|^i``.

    Both sums run in extended precision where the platform has it, so the
    value is insensitive to rescaling ``p`` up to the rounding of the
    coefficients themselves.
    """
    z = np.clongdouble(z)
    az = abs(z)
    num = np.clongdouble(0)
    den = np.longdouble(0)
    with np.errstate(over="ignore", invalid="ignore"):
        for c in p.coeffs[::-1]:
            num = num * z + np.clongdouble(c)
            den = den * az + np.longdouble(abs(c))
    num = abs(num)
    if den == 0 or not np.isfinite(den):
        if den == 0:
            return 0.0 if num == 0 else math.inf
        return math.nan
    return float(num / den)


# -- text format -----------------------------------------------------------


def parse_poly(text: str) -> Polynomial:
    lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PolyFormatError("empty input", 1)
    n0, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "d" or parts[2] not in ("real", "complex"):
        raise PolyFormatError("expected header 'd <degree> <real|complex>'", n0)
    try:
        d = int(parts[1])
    except ValueError:
        raise PolyFormatError(f"bad degree {parts[1]!r}", n0) from None
    if d < 0:
        raise PolyFormatError("negative degree", n0)
    is_real = parts[2] == "real"
    body = lines[1:]
    if len(body) != d + 1:
        line = body[d + 1][0] if len(body) > d + 1 else (body[-1][0] + 1 if body else n0 + 1)
        raise PolyFormatError(f"expected {d + 1} coefficient lines, got {len(body)}", line)
    coeffs = []
    for n, ln in body:
        fields = ln.split()
        if len(fields) != (1 if is_real else 2):
            raise PolyFormatError(f"expected {'1' if is_real else '2'} number(s), got {ln!r}", n)
        try:
            vals = [float(v) for v in fields]
        except ValueError:
            raise PolyFormatError(f"not a number: {ln!r}", n) from None
        coeffs.append(complex(vals[0], vals[1] if len(vals) > 1 else 0.0))
    if coeffs[-1] == 0:
        raise PolyFormatError("leading coefficient is zero", body[-1][0])
    if is_real:
        return Polynomial(coeffs, True)
    return Polynomial(coeffs, False)


def format_poly(p: Polynomial) -> str:
    kind = "real" if p.is_real else "complex"
    out = [f"d {p.degree} {kind}"]
    for c in p.coeffs:
        out.append(repr(float(c.real)) if p.is_real else f"{float(c.real)!r} {float(c.imag)!r}")
    return "\n".join(out) + "\n"


def read_poly(path) -> Polynomial:
    return parse_poly(Path(path).read_text())


def write_poly(p: Polynomial, path) -> None:
    Path(path).write_text(format_poly(p))
