"""Renormalized Newton diagram: strict lower convex hull of ``i -> r_i``."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)
_TINY_LOG = math.log(1e-300)


@dataclass(frozen=True)
class NewtonDiagram:
    corners: tuple[int, ...]
    tolerance_E: float
    stack_ops: int = 0

    def segments(self):
        return list(zip(self.corners[:-1], self.corners[1:]))


def hull_tolerance(N: int, d: int, rho: float) -> float:
    """Slope margin used to decide sharp corners at level ``N``.

    ``R = rho**(2**N)`` is handled through its logarithm. While ``2**d / R >= 1``
    the margin is unbounded and ``inf`` is returned.
    """
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    log_rho = math.log(rho)
    log_x = d * LOG2 - math.ldexp(log_rho, N)  # log(2^d / R)
    if log_x >= 0:
        return math.inf
    x = 0.0 if log_x < _TINY_LOG else math.exp(log_x)
    log_inv_r = -math.ldexp(log_rho, N)
    inv_r = 0.0 if log_inv_r < _TINY_LOG else math.exp(log_inv_r)
    scale = math.ldexp(1.0, -N)
    return 0.5 * (
        2 * scale * (d * LOG2 + math.log1p(inv_r))
        - 4 * scale * math.log1p(-x)
        + log_rho / 2
    )


def corner_threshold(d: int, rho: float) -> float:
    """Level beyond which the hull is exact for separation ``rho``."""
    return 3 + math.log2(d * LOG2 / math.log(rho))


def _slope(r, a, b):
    """Slope of the chord from ``a`` to ``b``; a vanished endpoint is +-inf."""
    ra, rb = r[a], r[b]
    if ra == math.inf:
        return -math.inf
    if rb == math.inf:
        return math.inf
    return (rb - ra) / (b - a)


def strict_convex_hull(N: int, d: int, r, rho: float, tolerance: float | None = None) -> NewtonDiagram:
    """Monotone-stack hull keeping only corners that are sharp by more than E.

    ``tolerance`` overrides the computed margin E.
    """
    r = np.asarray(r, dtype=float)
    if r.size != d + 1:
        raise ValueError(f"expected {d + 1} radial values, got {r.size}")
    if math.isinf(r[0]) or math.isinf(r[d]):
        raise ValueError("endpoint coefficient vanished")
    E = hull_tolerance(N, d, rho) if tolerance is None else float(tolerance)
    stack = [0]
    ops = 1
    for i in range(1, d + 1):
        if r[i] == math.inf:
            continue
        while len(stack) > 1:
            a, b = stack[-2], stack[-1]
            if _slope(r, a, b) > _slope(r, b, i) - E:
                stack.pop()
                ops += 1
            else:
                break
        stack.append(i)
        ops += 1
    return NewtonDiagram(tuple(stack), E, ops)


def segment_moduli(diagram: NewtonDiagram, r) -> np.ndarray:
    """Root modulus estimates, one per root, from the diagram's slopes."""
    out = []
    for a, b in diagram.segments():
        out.extend([math.exp((r[b] - r[a]) / (b - a))] * (b - a))
    return np.array(out)


def write_diagram_csv(fh, rows) -> None:
    """Rows of ``(N, i, r_i, is_corner)``."""
    w = csv.writer(fh)
    w.writerow(["N", "i", "r", "is_corner"])
    for N, i, ri, corner in rows:
        w.writerow([N, i, repr(float(ri)), int(bool(corner))])
