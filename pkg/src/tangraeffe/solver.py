"""Top-level solve loop: preprocess, iterate, recover, polish, order."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .diagram import corner_threshold, strict_convex_hull
from .graeffe import init_jet, tangent_graeffe_renorm
from .poly import (
    DegenerateThetaError,
    Polynomial,
    backward_error,
    deflate_zero_roots,
    derivative,
    eval_poly,
    mobius_pullback,
    mobius_transform,
)
from .recover import RootKind, complex_recover, real_recover

RHO_FLOOR = 1 + 1e-8
THETA_RETRIES = 32
# Whole-pipeline attempts: the identity map first, then seeded transforms.
MAX_ATTEMPTS = 8
# Largest backward error a certified root vector may carry.
CERT_BACKWARD = 1e-11
CERT_BACKWARD_UNPOLISHED = 1e-7
# Once the change between iterates is below this, a growing change means the
# rounding floor has been reached.
PLATEAU_GATE = 1e-6


class SolveError(ArithmeticError):
    pass


class StopReason(str, enum.Enum):
    CONVERGED = "converged"
    MAX_LEVEL = "max_level"
    SATURATED = "saturated"


@dataclass(frozen=True)
class SolveOptions:
    max_level: int = 40
    root_rtol: float = 1e-12
    polish: bool = True
    seed: int = 0
    mode: str | None = None  # "real" | "complex"; None follows the polynomial
    rho_initial: float = 2.0

    def __post_init__(self):
        if not 1 <= self.max_level <= 40:
            raise ValueError("max_level must lie in [1, 40]")
        if not self.root_rtol > 0:
            raise ValueError("root_rtol must be positive")
        if self.mode not in (None, "real", "complex"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.rho_initial > 1:
            raise ValueError("rho_initial must exceed 1")


@dataclass(frozen=True)
class IterationRecord:
    level: int
    corners: int
    max_delta: float
    rho: float


@dataclass(frozen=True)
class SolveReport:
    roots: np.ndarray
    zero_root_multiplicity: int
    iterations_used: int
    backward_errors: np.ndarray
    theta_used: float
    stop_reason: StopReason
    per_iteration: list[IterationRecord] = field(default_factory=list)
    multiplicities: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "roots": [{"re": float(z.real), "im": float(z.imag)} for z in self.roots],
            "zero_multiplicity": self.zero_root_multiplicity,
            "iterations": self.iterations_used,
            "backward_errors": [float(e) for e in self.backward_errors],
            "stop_reason": self.stop_reason.value,
            "theta": self.theta_used,
        }


def _draw_theta(rng) -> float:
    t = float(rng.uniform(-math.pi, math.pi))
    return math.pi if t == -math.pi else t


def _transform(q: Polynomial, rng) -> tuple[Polynomial, float]:
    for _ in range(THETA_RETRIES):
        theta = _draw_theta(rng)
        try:
            return mobius_transform(q, theta), theta
        except DegenerateThetaError:
            continue
    raise SolveError("degenerate theta after all retries")


def _max_rel_change(new: np.ndarray, old: np.ndarray | None) -> float:
    if old is None or old.shape != new.shape:
        return math.inf
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.maximum(np.abs(new), np.abs(old))
        rel = np.where(scale > 0, np.abs(new - old) / scale, 0.0)
    rel = np.where(np.isfinite(rel), rel, math.inf)
    return float(np.max(rel)) if rel.size else 0.0


def _pullback_all(values, theta):
    out = np.empty(len(values), dtype=complex)
    for k, z in enumerate(values):
        try:
            out[k] = mobius_pullback(z, theta)
        except ZeroDivisionError:
            out[k] = complex(math.inf, 0)
    return out


def _iterate(f: Polynomial, theta: float, real: bool, opts: SolveOptions):
    d = f.degree
    jet = init_jet(f)
    rho = opts.rho_initial
    recover = real_recover if real else complex_recover
    prev = None
    prev_delta = math.inf
    history = []
    stop = StopReason.MAX_LEVEL
    est = None
    for _ in range(opts.max_level):
        jet = tangent_graeffe_renorm(jet)
        N = jet.level
        diagram = strict_convex_hull(N, d, jet.r, rho)
        est = recover(N, d, diagram, jet)
        roots = _pullback_all([e.value for e in est], theta)
        delta = _max_rel_change(roots, prev)
        history.append(IterationRecord(N, len(diagram.corners), delta, rho))
        prev = roots
        if N > corner_threshold(d, rho):
            rho = max(math.sqrt(rho), RHO_FLOOR)
        if all(e.saturated for e in est):
            stop = StopReason.SATURATED
            break
        simple = all(
            e.kind in (RootKind.ISOLATED_REAL, RootKind.COMPLEX_ISOLATED, RootKind.CONJUGATE_PAIR)
            for e in est
        )
        if simple and (delta < opts.root_rtol or (delta < PLATEAU_GATE and delta >= prev_delta)):
            stop = StopReason.CONVERGED
            break
        prev_delta = delta
    return est, prev, history, stop


def _newton(q: Polynomial, dq: Polynomial, z: complex, steps: int, real: bool) -> complex:
    fz = abs(eval_poly(q, z))
    for _ in range(steps):
        if fz == 0:
            break
        dz = eval_poly(dq, z)
        if dz == 0 or not np.isfinite(dz):
            break
        step = eval_poly(q, z) / dz
        if real:
            step = step.real
        zn = z - step
        fn = abs(eval_poly(q, zn))
        if not fn < fz:
            break
        z, fz = zn, fn
        if abs(step) <= 4 * np.finfo(float).eps * abs(z):
            break
    return z


def polish_newton(p: Polynomial, roots, multiplicities=None, max_steps: int = 20) -> np.ndarray:
    """Refine each root by Newton's method on ``p``.

    A root of multiplicity ``m`` is refined as a simple root of the
    ``(m-1)``-th derivative. Steps that do not decrease the residual are
    rejected.
    """
    roots = np.asarray(roots, dtype=complex)
    if multiplicities is None:
        multiplicities = np.ones(roots.size, dtype=int)
    derivs = [p]
    out = roots.copy()
    for k, (z, m) in enumerate(zip(roots, multiplicities)):
        m = max(1, min(int(m), p.degree))
        while len(derivs) <= m:
            derivs.append(derivative(derivs[-1]))
        real = p.is_real and z.imag == 0
        out[k] = _newton(derivs[m - 1], derivs[m], complex(z), max_steps, real)
    return out


def _pair_up(roots: np.ndarray, rtol: float = 1e-6):
    """Split real-mode roots into reals and (upper, lower) conjugate pairs."""
    reals = [z for z in roots if z.imag == 0]
    upper = [z for z in roots if z.imag > 0]
    lower = [z for z in roots if z.imag < 0]
    if len(upper) != len(lower):
        raise ValueError("non-real roots are not closed under conjugation")
    pairs = []
    for u in sorted(upper, key=lambda z: (abs(z), np.angle(z))):
        k = int(np.argmin([abs(u.conjugate() - w) for w in lower]))
        if abs(u.conjugate() - lower[k]) > rtol * max(abs(u), 1e-300):
            raise ValueError(f"root {u} has no conjugate partner")
        pairs.append((u, lower.pop(k)))
    return reals, pairs


def canonical_order(roots, mode: str = "complex") -> np.ndarray:
    """Nondecreasing modulus; in real mode each conjugate pair is kept
    adjacent, upper member first. Remaining ties break by ascending argument.
    """
    roots = np.asarray(roots, dtype=complex)
    if mode == "complex":
        return np.array(sorted(roots, key=lambda z: (abs(z), np.angle(z))), dtype=complex)
    reals, pairs = _pair_up(roots)
    units = [(abs(z), np.angle(z), (z,)) for z in reals]
    units += [(abs(u), np.angle(u), (u, w)) for u, w in pairs]
    units.sort(key=lambda t: (t[0], t[1]))
    return np.array([z for _, _, grp in units for z in grp], dtype=complex)


def _solve_once(p, q, k, f, theta, real, opts, order_mode) -> SolveReport:
    est, roots, history, stop = _iterate(f, theta, real, opts)
    mult = np.array([e.multiplicity for e in est])
    if real:
        roots = _mirror_pairs(roots, est)
    if opts.polish:
        roots = polish_newton(q, roots, mult)
    if real:
        roots = _mirror_pairs(roots, est)
    roots_ord = canonical_order(roots, order_mode)
    order = _order_index(roots, roots_ord)
    bw = np.array([backward_error(p, z) for z in roots_ord])
    return SolveReport(
        roots=roots_ord,
        zero_root_multiplicity=k,
        iterations_used=history[-1].level if history else 0,
        backward_errors=bw,
        theta_used=theta,
        stop_reason=stop,
        per_iteration=history,
        multiplicities=mult[order],
    )


def _has_duplicates(report: SolveReport, rtol: float = 1e-8) -> bool:
    """Two roots flagged simple that coincide: one root was found twice."""
    z = report.roots[report.multiplicities == 1]
    for i in range(z.size):
        close = np.abs(z[i + 1 :] - z[i]) <= rtol * max(abs(z[i]), 1e-300)
        if np.any(close):
            return True
    return False


def _certified(report: SolveReport, opts: SolveOptions) -> bool:
    tol = CERT_BACKWARD if opts.polish else CERT_BACKWARD_UNPOLISHED
    bw = report.backward_errors
    return (
        report.stop_reason != StopReason.MAX_LEVEL
        and bool(np.all(bw <= tol))
        and not _has_duplicates(report)
    )


def _mirror_pairs(roots: np.ndarray, est) -> np.ndarray:
    """Force exact conjugate closure for roots recovered as pairs."""
    out = roots.copy()
    i = 0
    n = len(est)
    while i < n:
        e = est[i]
        if e.kind == RootKind.CONJUGATE_PAIR or (
            e.kind == RootKind.MULTIPLE and e.value.imag != 0
        ):
            j = i + 1
            u = out[i]
            if u.imag == 0:
                # pair collapsed onto the axis while polishing
                out[i] = out[j] = complex(u.real, 0.0)
            else:
                u = complex(u.real, abs(u.imag))
                out[i], out[j] = u, u.conjugate()
            i += 2
        else:
            out[i] = complex(out[i].real, 0.0)
            i += 1
    return out


def _order_index(roots, ordered) -> np.ndarray:
    used = np.zeros(len(roots), dtype=bool)
    idx = []
    for z in ordered:
        cand = np.flatnonzero(~used & (roots == z))
        k = int(cand[0]) if cand.size else int(np.argmin(np.where(used, np.inf, np.abs(roots - z))))
        used[k] = True
        idx.append(k)
    return np.array(idx, dtype=int)


def solve(p: Polynomial, opts: SolveOptions | None = None) -> SolveReport:
    """Compute all roots of ``p``."""
    opts = opts or SolveOptions()
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    mode = opts.mode or ("real" if p.is_real else "complex")
    if mode == "real" and not p.is_real:
        raise ValueError("real mode requires real coefficients")
    # Real conformal maps commute with conjugation, so no transform makes a
    # conjugate pair circle-free in the complex sense: real coefficients
    # always take the pair-aware recovery.
    real = p.is_real
    q, k = deflate_zero_roots(p)
    if q.degree == 0:
        return SolveReport(
            roots=np.zeros(0, dtype=complex),
            zero_root_multiplicity=k,
            iterations_used=0,
            backward_errors=np.zeros(0),
            theta_used=0.0,
            stop_reason=StopReason.CONVERGED,
            multiplicities=np.zeros(0, dtype=int),
        )
    rng = np.random.default_rng(opts.seed)
    best = None
    for attempt in range(MAX_ATTEMPTS):
        if attempt == 0:
            f, theta = q, 0.0
        else:
            try:
                f, theta = _transform(q, rng)
            except SolveError:
                if best is None:
                    raise
                break
        report = _solve_once(p, q, k, f, theta, real, opts, mode)
        if _certified(report, opts):
            return report
        if best is None or _score(report) < _score(best):
            best = report
    return best


def _score(report: SolveReport) -> tuple:
    bw = report.backward_errors
    worst = float(np.max(bw)) if bw.size else 0.0
    return (_has_duplicates(report), worst if np.isfinite(worst) else math.inf)
