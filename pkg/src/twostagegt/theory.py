"""Asymptotic expected-test formulas, rates, and per-family optimizers.

Every formula is normalized per item (expected tests divided by n) and
describes the large-n behaviour of a conservative two-stage scheme with
the given first stage.  The rate is binary entropy over expected tests
per item, in bits per test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .designs import (
    Bernoulli,
    ConstantTestsPerItem,
    Dorfman,
    DoublyConstant,
    Individual,
    SchemeConfig,
)

E = math.e
LN2 = math.log(2)

# Above this prevalence the optimal Bernoulli first stage is empty.
BERNOULLI_THRESHOLD = 1 / (E + 1)

OPTIMIZABLE_FAMILIES = ("dorfman", "bernoulli", "ctpi", "doubly_constant")

# et values closer than this are treated as ties (broken toward fewer
# stage-one tests).
_TIE_EPS = 1e-12


def entropy(p: float) -> float:
    """Binary entropy in bits, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def dorfman_et(s, p):
    """Expected tests per item with groups of size s: 1/s + 1 - (1-p)^s."""
    _require_at_least(s, 1, "group size")
    _require_prob(p)
    return 1.0 / s + 1.0 - (1.0 - p) ** s


def bernoulli_et(t1_frac, sigma, p):
    """Expected tests per item with a Bernoulli first stage.

    t1_frac is the stage-one tests per item, sigma the mean items per test:
    t1_frac + p + (1-p) exp(-sigma e^{-sigma p} t1_frac).
    """
    if np.any(np.asarray(t1_frac) < 0):
        raise ValueError("stage-one tests per item must be non-negative")
    if np.any(np.asarray(sigma) <= 0):
        raise ValueError("mean items per test must be positive")
    _require_prob(p)
    return t1_frac + p + (1.0 - p) * np.exp(-sigma * np.exp(-sigma * p) * t1_frac)


def ctpi_et(r, sigma, p):
    """Expected tests per item with r tests per item, sigma mean items per test:
    r/sigma + p + (1-p)(1 - e^{-p sigma})^r."""
    _require_at_least(r, 1, "tests per item")
    if np.any(np.asarray(sigma) <= 0):
        raise ValueError("mean items per test must be positive")
    _require_prob(p)
    return r / sigma + p + (1.0 - p) * (1.0 - np.exp(-p * sigma)) ** r


def dc_et(r, s, p):
    """Expected tests per item with r tests per item and s items per test:
    r/s + p + (1-p)(1 - (1-p)^{s-1})^r."""
    _require_at_least(r, 1, "tests per item")
    _require_at_least(s, 1, "items per test")
    _require_prob(p)
    q = 1.0 - p
    return r / s + p + q * (1.0 - q ** (s - 1.0)) ** r


def mutesa_asymptotic_et(p: float) -> float:
    """Small-p cost of the multi-stage hypercube scheme: e p ln(1/p)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"prevalence must be in (0, 1), got {p}")
    return E * p * math.log(1.0 / p)


def mutesa_rate() -> float:
    """Small-p rate of the multi-stage hypercube scheme: 1/(e ln 2)."""
    return 1.0 / (E * LN2)


def rate(p: float, et_per_item: float) -> float:
    """Bits learned per test: entropy(p) / et_per_item."""
    if et_per_item <= 0:
        raise ValueError(f"expected tests per item must be positive, got {et_per_item}")
    return entropy(p) / et_per_item


@dataclass(frozen=True)
class TheoryPoint:
    """One scheme evaluated at one prevalence."""

    p: float
    scheme: str
    params: dict[str, float]
    et_per_item: float
    rate: float

    @property
    def aspect_ratio(self) -> float:
        """Expected tests per item; alias used on the curve plots."""
        return self.et_per_item


def theory_point(p: float, scheme: str, params: dict[str, float], et_per_item: float) -> TheoryPoint:
    return TheoryPoint(
        p=p, scheme=scheme, params=params, et_per_item=et_per_item, rate=rate(p, et_per_item)
    )


@dataclass(frozen=True)
class BernoulliOptimum:
    sigma: float
    t1_frac: float
    et_per_item: float


def bernoulli_optimum(p: float) -> BernoulliOptimum:
    """Optimal Bernoulli first stage at prevalence p.

    sigma* = 1/p always; for p <= 1/(e+1) the optimal stage-one size is
    e p ln(e^{-1}(1-p)/p) tests per item with cost p(e ln((1-p)/p) + 1),
    otherwise an empty first stage (cost 1) is optimal.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"prevalence must be in (0, 1), got {p}")
    sigma = 1.0 / p
    if p >= BERNOULLI_THRESHOLD:
        return BernoulliOptimum(sigma=sigma, t1_frac=0.0, et_per_item=1.0)
    t1_frac = max(0.0, E * p * math.log((1.0 - p) / (E * p)))
    et = p * (E * math.log((1.0 - p) / p) + 1.0)
    return BernoulliOptimum(sigma=sigma, t1_frac=t1_frac, et_per_item=et)


@dataclass(frozen=True)
class OptimizationResult:
    """Best first stage of one family at one prevalence.

    ``params`` is None when an empty first stage (individual testing,
    one test per item) is at least as good as every parameterization.
    """

    family: str
    params: dict[str, float] | None
    et_per_item: float
    rate: float
    t1_frac: float

    @property
    def first_stage(self) -> bool:
        return self.params is not None


def golden_section_minimize(fn, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Argmin of a unimodal function on [lo, hi] by golden-section search."""
    if not lo < hi:
        raise ValueError(f"empty search bracket [{lo}, {hi}]")
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    inv_phi_sq = (3.0 - math.sqrt(5.0)) / 2.0
    dist = hi - lo
    if dist <= tol:
        return (lo + hi) / 2.0
    steps = int(math.ceil(math.log(tol / dist) / math.log(inv_phi)))
    c = lo + inv_phi_sq * dist
    d = lo + inv_phi * dist
    yc = fn(c)
    yd = fn(d)
    for _ in range(steps - 1):
        dist *= inv_phi
        if yc < yd:
            hi, d, yd = d, c, yc
            c = lo + inv_phi_sq * dist
            yc = fn(c)
        else:
            lo, c, yc = c, d, yd
            d = lo + inv_phi * dist
            yd = fn(d)
    return (lo + d) / 2.0 if yc < yd else (c + hi) / 2.0


def optimize_scheme(
    family: str,
    p: float,
    r_max: int = 20,
    s_max: int | None = None,
    sigma_max: float | None = None,
) -> OptimizationResult:
    """Minimize a family's expected tests per item over its parameters.

    The search always competes against the empty first stage (cost 1);
    ties go to the candidate with fewer stage-one tests.  Default limits
    bracket the optima comfortably: the best sigma is about ln(2)/p and
    the best s is O(1/p), both far below 8/p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"prevalence must be in (0, 1), got {p}")
    if family not in OPTIMIZABLE_FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if s_max is None:
        s_max = math.ceil(8.0 / p)
    if sigma_max is None:
        sigma_max = 8.0 / p
    if r_max < 1 or s_max < 2 or sigma_max <= 0:
        raise ValueError("empty search range")

    # (et, t1_frac, params)
    candidates: list[tuple[float, float, dict[str, float] | None]] = [(1.0, 0.0, None)]

    if family == "dorfman":
        s_grid = np.arange(2, s_max + 1, dtype=float)
        et = dorfman_et(s_grid, p)
        s_best = _tie_break_scan(et, 1.0 / s_grid, s_grid)
        candidates.append(
            (float(dorfman_et(s_best, p)), 1.0 / s_best, {"s": s_best})
        )
    elif family == "bernoulli":
        opt = bernoulli_optimum(p)
        if opt.t1_frac > 0.0:
            candidates.append(
                (opt.et_per_item, opt.t1_frac, {"sigma": opt.sigma, "t1_frac": opt.t1_frac})
            )
    elif family == "ctpi":
        # The sigma profile is not globally unimodal (it re-descends toward 1
        # at huge sigma), so bracket the interior minimum on a coarse grid
        # first and refine by golden section inside that bracket.
        coarse = np.linspace(sigma_max / 512, sigma_max, 512)
        for r in range(1, r_max + 1):
            idx = int(np.argmin(ctpi_et(r, coarse, p)))
            lo = coarse[max(0, idx - 1)]
            hi = coarse[min(len(coarse) - 1, idx + 1)]
            sigma = golden_section_minimize(lambda sg: float(ctpi_et(r, sg, p)), lo, hi)
            candidates.append(
                (float(ctpi_et(r, sigma, p)), r / sigma, {"r": r, "sigma": sigma})
            )
    elif family == "doubly_constant":
        s_grid = np.arange(2, s_max + 1, dtype=float)
        for r in range(1, r_max + 1):
            et = dc_et(r, s_grid, p)
            s_best = _tie_break_scan(et, r / s_grid, s_grid)
            candidates.append(
                (float(dc_et(r, s_best, p)), r / s_best, {"r": r, "s": s_best})
            )

    best_et = min(c[0] for c in candidates)
    eligible = [c for c in candidates if c[0] <= best_et + _TIE_EPS]
    et, t1_frac, params = min(eligible, key=lambda c: c[1])
    return OptimizationResult(
        family=family,
        params=params,
        et_per_item=et,
        rate=rate(p, et),
        t1_frac=t1_frac,
    )


def scheme_theory_et(scheme: SchemeConfig, n: int, p: float) -> float | None:
    """Per-item theory prediction for a concrete scheme on n items.

    Returns None for schemes without a closed form (the hypercube slice
    design used as a generic first stage).
    """
    if isinstance(scheme, Individual):
        return 1.0
    if isinstance(scheme, Dorfman):
        return float(dorfman_et(scheme.s, p))
    if isinstance(scheme, Bernoulli):
        return float(bernoulli_et(scheme.t1 / n, scheme.sigma(n), p))
    if isinstance(scheme, ConstantTestsPerItem):
        return float(ctpi_et(scheme.r, scheme.sigma(n), p))
    if isinstance(scheme, DoublyConstant):
        return float(dc_et(scheme.r, scheme.s, p))
    return None


def _tie_break_scan(et: np.ndarray, t1_frac: np.ndarray, grid: np.ndarray) -> int:
    """Grid value minimizing et; among near-ties, the one with fewest tests."""
    best = float(et.min())
    eligible = np.flatnonzero(et <= best + _TIE_EPS)
    idx = eligible[np.argmin(t1_frac[eligible])]
    return int(grid[idx])


def _require_prob(p) -> None:
    arr = np.asarray(p)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"probability must be in [0, 1], got {p}")


def _require_at_least(value, minimum, label: str) -> None:
    if np.any(np.asarray(value) < minimum):
        raise ValueError(f"{label} must be >= {minimum}, got {value}")
