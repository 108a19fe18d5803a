"""Lower bounds on expected tests for two-stage and conservative schemes.

All bounds are per item.  The driving quantities are the integer-w
maximizations

    f(p) = max_{w>=2} { -w ln(1 - (1-p)^(w-1)) }
    g(p) = max_{w>=2} { -w ln(1 - (1-p)^w) }

which control how fast a first stage of t tests per item can rule items
out.  Whenever the interior-optimal stage-one size from the derivation
is negative (f or g too small), the bound is evaluated at an empty first
stage and equals 1 per item.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .theory import entropy

# Individual testing is optimal for p >= (3 - sqrt(5))/2 = 0.38197.
UNGAR_THRESHOLD = (3.0 - math.sqrt(5.0)) / 2.0

LN2 = math.log(2)


class WMaximum(NamedTuple):
    value: float
    argmax_w: int


@dataclass(frozen=True)
class BoundReport:
    """All lower bounds at one prevalence, their max, and the rate ceiling."""

    p: float
    counting: float
    thm1_two_stage: float
    bound1_ungar: float | None
    bound2: float
    bound3: float
    best: float
    binding: str
    rate_ceiling: float
    f_value: float
    f_argmax_w: int
    g_value: float
    g_argmax_w: int


def _scan_w_max(p: float, exponent_offset: int, w_limit: int | None) -> WMaximum:
    """Maximize -w ln(1 - q^(w - offset)) over integers w >= 2.

    The continuous optimum sits near w = ln(2)/(-ln q); the default scan
    limit of six times that (plus slack) brackets it with a wide margin.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"prevalence must be in (0, 1), got {p}")
    lnq = math.log1p(-p)
    if w_limit is None:
        w_limit = math.ceil(6.0 * LN2 / (-lnq)) + 4
    best = -math.inf
    best_w = 2
    for w in range(2, w_limit + 1):
        one_minus_qpow = -math.expm1((w - exponent_offset) * lnq)
        value = -w * math.log(one_minus_qpow)
        if value > best:
            best = value
            best_w = w
    return WMaximum(best, best_w)


def f_of_p(p: float, w_limit: int | None = None) -> WMaximum:
    """max_{w>=2} -w ln(1 - (1-p)^(w-1)) and its maximizer."""
    return _scan_w_max(p, exponent_offset=1, w_limit=w_limit)


def g_of_p(p: float, w_limit: int | None = None) -> WMaximum:
    """max_{w>=2} -w ln(1 - (1-p)^w) and its maximizer."""
    return _scan_w_max(p, exponent_offset=0, w_limit=w_limit)


class TwoStageBound(NamedTuple):
    et_per_item: float
    t1_frac: float


def two_stage_lower_bound(p: float) -> TwoStageBound:
    """Per-item lower bound for (not necessarily conservative) two-stage testing.

    Minimizes t + exp(-f(p) t) over stage-one sizes t >= 0: the interior
    optimum t = ln(f)/f applies when f(p) > 1, otherwise t = 0 binds and
    the bound is 1 per item.
    """
    f, _ = f_of_p(p)
    if f > 1.0:
        return TwoStageBound((math.log(f) + 1.0) / f, math.log(f) / f)
    return TwoStageBound(1.0, 0.0)


def conservative_lower_bound(p: float) -> BoundReport:
    """Evaluate all conservative two-stage bounds at prevalence ``p``.

    Bounds: counting (entropy), individual-testing optimality above the
    Ungar threshold, (1/g)(ln g + 1), and p + (1/f)(ln((1-p)f) + 1); the
    last two fall back to 1 when their interior optimum is infeasible.
    ``binding`` names the maximizer (ties favour the Ungar bound).
    """
    f, fw = f_of_p(p)
    g, gw = g_of_p(p)
    counting = entropy(p)
    thm1 = two_stage_lower_bound(p).et_per_item
    ungar: float | None = 1.0 if p >= UNGAR_THRESHOLD else None
    bound2 = (math.log(g) + 1.0) / g if g > 1.0 else 1.0
    if (1.0 - p) * f > 1.0:
        bound3 = p + (math.log((1.0 - p) * f) + 1.0) / f
    else:
        bound3 = 1.0

    labelled = []
    if ungar is not None:
        labelled.append(("ungar", ungar))
    labelled += [("bound2", bound2), ("bound3", bound3), ("counting", counting)]
    best = -math.inf
    binding = "counting"
    for label, value in labelled:
        if value > best:
            best = value
            binding = label

    return BoundReport(
        p=p,
        counting=counting,
        thm1_two_stage=thm1,
        bound1_ungar=ungar,
        bound2=bound2,
        bound3=bound3,
        best=best,
        binding=binding,
        rate_ceiling=counting / best,
        f_value=f,
        f_argmax_w=fw,
        g_value=g,
        g_argmax_w=gw,
    )


def bound_crossover(lo: float, hi: float, tol: float = 1e-6) -> float:
    """Prevalence where bound2 - bound3 changes sign, by bisection on [lo, hi]."""

    def diff(p: float) -> float:
        report = conservative_lower_bound(p)
        return report.bound2 - report.bound3

    d_lo = diff(lo)
    d_hi = diff(hi)
    if d_lo * d_hi >= 0.0:
        raise ValueError(
            f"bound2 - bound3 does not change sign on [{lo}, {hi}]"
        )
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        d_mid = diff(mid)
        if d_mid == 0.0:
            return mid
        if d_lo * d_mid < 0.0:
            hi = mid
        else:
            lo, d_lo = mid, d_mid
    return (lo + hi) / 2.0
