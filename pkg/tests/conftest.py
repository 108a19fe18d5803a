"""Shared helpers for randomized design/decoding tests."""

from __future__ import annotations

import numpy as np

from twostagegt.designs import (
    PoolingDesign,
    bernoulli_design,
    ctpi_design,
    dorfman_design,
    doubly_constant_design,
    hypercube_design,
)

GENERATOR_KINDS = ("dorfman", "bernoulli", "ctpi", "doubly_constant", "hypercube")


def random_design(rng: np.random.Generator, kind: str | None = None) -> PoolingDesign:
    """Small random design drawn from one of the five generator families."""
    if kind is None:
        kind = GENERATOR_KINDS[rng.integers(0, len(GENERATOR_KINDS))]
    if kind == "dorfman":
        s = int(rng.integers(1, 7))
        return dorfman_design(n=s * int(rng.integers(1, 6)), s=s)
    if kind == "bernoulli":
        return bernoulli_design(
            n=int(rng.integers(1, 31)),
            t1=int(rng.integers(0, 13)),
            pi=float(rng.random()),
            seed=rng,
        )
    if kind == "ctpi":
        r = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        return ctpi_design(n=int(rng.integers(1, 26)), t1=r * m, r=r, seed=rng)
    if kind == "doubly_constant":
        r = int(rng.integers(1, 5))
        s = int(rng.integers(1, 7))
        return doubly_constant_design(n=s * int(rng.integers(1, 6)), r=r, s=s, seed=rng)
    a = int(rng.integers(2, 5))
    r2 = int(rng.integers(1, 4))
    return hypercube_design(a=a, r2=r2)


def random_defectives(rng: np.random.Generator, n: int) -> frozenset[int]:
    """Defective set with a prevalence drawn uniformly from [0, 0.5]."""
    p = 0.5 * rng.random()
    return frozenset(np.flatnonzero(rng.random(n) < p).tolist())


def transpose_of(design: PoolingDesign) -> tuple[tuple[int, ...], ...]:
    """Item membership recomputed directly from the test sets."""
    membership: list[list[int]] = [[] for _ in range(design.n)]
    for t, members in enumerate(design.tests):
        for i in sorted(members):
            membership[i].append(t)
    return tuple(tuple(sorted(ts)) for ts in membership)
