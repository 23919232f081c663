"""Root recovery from a renormalized tangent jet and its Newton diagram.

For successive corners ``a < b`` the log-derivative difference
``gdot_b/g_b - gdot_a/g_a`` tends to ``2**N * sum 1/zeta`` over the roots of
the segment, and the diagram slope gives ``|zeta|**2``. Their product yields
the root (complex case) or its real part (real case).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .diagram import NewtonDiagram
from .graeffe import RenJet
from .renorm import EXP_CLAMP, _dd_add, _ren_sum_dd

LOG2 = math.log(2.0)


class RootKind(str, enum.Enum):
    ISOLATED_REAL = "isolated_real"
    CONJUGATE_PAIR = "conjugate_pair"
    MULTIPLE = "multiple"
    COMPLEX_ISOLATED = "complex_isolated"


@dataclass(frozen=True)
class RootEstimate:
    value: complex
    modulus: float
    group_start: int
    group_end: int
    kind: RootKind
    multiplicity: int = 1
    saturated: bool = False
    low_confidence: bool = False


def _segment(N, jet, a, b):
    """Return ``(phase, log|scaled difference|, log m, saturated)``.

    ``scaled difference`` is ``2**-N / d' * m * (gdot_b/g_b - gdot_a/g_a)``
    with ``m = |zeta|**2`` from the diagram slope.
    """
    r, rl, al = jet.r, jet.r_lo, jet.alpha
    rh, rhl, ah = jet.rhat, jet.rhat_lo, jet.alphahat
    p = 2.0**N
    dp = b - a
    qb, qbl = _dd_add(rh[b], rhl[b], -r[b], -rl[b])
    qa, qal = _dd_add(rh[a], rhl[a], -r[a], -rl[a])
    bb, _, beta = _ren_sum_dd(qb, qbl, ah[b] / al[b], qa, qal, -ah[a] / al[a], p)
    log_m = 2.0 * ((r[b] - r[a]) + (rl[b] - rl[a])) / dp
    if bb == math.inf:
        return beta, -math.inf, log_m, False
    log_x = -N * LOG2 - math.log(dp) + log_m - p * bb
    saturated = abs(log_x) > EXP_CLAMP
    if saturated:
        log_x = math.copysign(EXP_CLAMP, log_x)
    return beta, log_x, log_m, saturated


def real_recover(N: int, d: int, diagram: NewtonDiagram, jet: RenJet) -> list[RootEstimate]:
    out = []
    for a, b in diagram.segments():
        dp = b - a
        beta, log_x, log_m, sat = _segment(N, jet, a, b)
        mod = math.exp(0.5 * log_m) if 0.5 * log_m < EXP_CLAMP else math.exp(EXP_CLAMP)
        x = beta.real * math.exp(log_x)
        ratio = x / mod if mod > 0 else math.inf
        if dp % 2 == 0 and abs(ratio) < 1:
            y = mod * math.sqrt((1 - ratio) * (1 + ratio))
            kind = RootKind.CONJUGATE_PAIR if dp == 2 else RootKind.MULTIPLE
            for k in range(dp):
                z = complex(x, y if k % 2 == 0 else -y)
                out.append(RootEstimate(z, mod, a, b, kind, dp // 2, sat))
        else:
            low = abs(x) < 1e-300
            xr = mod if low else math.copysign(mod, x)
            kind = RootKind.ISOLATED_REAL if dp == 1 else RootKind.MULTIPLE
            out.extend(
                RootEstimate(complex(xr, 0.0), mod, a, b, kind, dp, sat, low) for _ in range(dp)
            )
    return out


def complex_recover(N: int, d: int, diagram: NewtonDiagram, jet: RenJet) -> list[RootEstimate]:
    out = []
    for a, b in diagram.segments():
        dp = b - a
        beta, log_x, log_m, sat = _segment(N, jet, a, b)
        mod = math.exp(min(0.5 * log_m, EXP_CLAMP))
        z = beta.conjugate() * math.exp(log_x)
        kind = RootKind.COMPLEX_ISOLATED if dp == 1 else RootKind.MULTIPLE
        out.extend(RootEstimate(z, mod, a, b, kind, dp, sat) for _ in range(dp))
    return out
