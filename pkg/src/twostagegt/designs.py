"""Stage-one pooling designs: the incidence structure and its generators.

A pooling design places each of ``n`` items into zero or more of ``t1``
pooled tests.  Generators are pure functions of their parameters and
seed; divisibility requirements are enforced, never rounded away.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np

# Anything accepted by np.random.default_rng.
Seed = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class PoolingDesign:
    """Bipartite incidence structure between ``n`` items and pooled tests.

    ``tests[t]`` is the set of item indices in test ``t``; ``item_tests[i]``
    is the tuple of test indices containing item ``i``.  The two views are
    kept consistent by construction.
    """

    n: int
    tests: tuple[frozenset[int], ...]
    item_tests: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"item count must be non-negative, got {self.n}")
        tests = tuple(frozenset(int(i) for i in members) for members in self.tests)
        object.__setattr__(self, "tests", tests)
        membership: list[list[int]] = [[] for _ in range(self.n)]
        for t, members in enumerate(tests):
            for i in members:
                if not 0 <= i < self.n:
                    raise ValueError(
                        f"test {t} contains item {i} outside [0, {self.n})"
                    )
                membership[i].append(t)
        object.__setattr__(
            self, "item_tests", tuple(tuple(ts) for ts in membership)
        )

    @property
    def t1(self) -> int:
        """Number of stage-one tests."""
        return len(self.tests)

    def test_weights(self) -> list[int]:
        """Items per test, indexed by test."""
        return [len(members) for members in self.tests]

    def item_weights(self) -> list[int]:
        """Tests per item, indexed by item."""
        return [len(ts) for ts in self.item_tests]


@dataclass(frozen=True)
class HypercubeDesign(PoolingDesign):
    """Pooling design whose tests are coordinate slices of an ``a^r2`` cube."""

    a: int = 0
    r2: int = 0


# --- scheme configurations -------------------------------------------------


@dataclass(frozen=True)
class Individual:
    """No stage-one tests; every item is tested individually in stage two."""

    family: ClassVar[str] = "individual"


@dataclass(frozen=True)
class Dorfman:
    """Partition into consecutive groups of ``s`` items, one test each."""

    family: ClassVar[str] = "dorfman"
    s: int

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError(f"group size must be >= 1, got {self.s}")

    def t1(self, n: int) -> int:
        return n // self.s


@dataclass(frozen=True)
class Bernoulli:
    """Each (item, test) pair included independently with probability ``pi``."""

    family: ClassVar[str] = "bernoulli"
    pi: float
    t1: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.pi <= 1.0:
            raise ValueError(f"inclusion probability must be in [0, 1], got {self.pi}")
        if self.t1 < 0:
            raise ValueError(f"test count must be non-negative, got {self.t1}")

    def sigma(self, n: int) -> float:
        """Mean items per test."""
        return self.pi * n


@dataclass(frozen=True)
class ConstantTestsPerItem:
    """Exactly ``r`` tests per item, assigned in ``r`` independent rounds."""

    family: ClassVar[str] = "ctpi"
    r: int
    t1: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError(f"tests per item must be >= 1, got {self.r}")
        if self.t1 < 1 or self.t1 % self.r != 0:
            raise ValueError(
                f"test count {self.t1} must be a positive multiple of r={self.r}"
            )

    def sigma(self, n: int) -> float:
        """Mean items per test."""
        return n * self.r / self.t1


@dataclass(frozen=True)
class DoublyConstant:
    """``r`` tests per item and ``s`` items per test, via random partitions."""

    family: ClassVar[str] = "doubly_constant"
    r: int
    s: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError(f"tests per item must be >= 1, got {self.r}")
        if self.s < 1:
            raise ValueError(f"items per test must be >= 1, got {self.s}")

    def t1(self, n: int) -> int:
        return n * self.r // self.s


@dataclass(frozen=True)
class Hypercube:
    """Items on an ``a``-sided ``r2``-cube; one test per coordinate slice."""

    family: ClassVar[str] = "hypercube"
    a: int
    r2: int

    def __post_init__(self) -> None:
        if self.a < 2:
            raise ValueError(f"side length must be >= 2, got {self.a}")
        if self.r2 < 1:
            raise ValueError(f"dimension must be >= 1, got {self.r2}")

    @property
    def n(self) -> int:
        return self.a**self.r2

    @property
    def t1(self) -> int:
        return self.a * self.r2

    @property
    def block_size(self) -> int:
        """Items reaching stage two together when used as a second stage."""
        return self.a ** (self.r2 - 1)


SchemeConfig = Union[
    Individual, Dorfman, Bernoulli, ConstantTestsPerItem, DoublyConstant, Hypercube
]

SCHEME_FAMILIES = {
    cls.family: cls
    for cls in (
        Individual,
        Dorfman,
        Bernoulli,
        ConstantTestsPerItem,
        DoublyConstant,
        Hypercube,
    )
}


def scheme_t1(scheme: SchemeConfig, n: int) -> int:
    """Stage-one test count of ``scheme`` on ``n`` items."""
    if isinstance(scheme, Individual):
        return 0
    if isinstance(scheme, Dorfman):
        return scheme.t1(n)
    if isinstance(scheme, (Bernoulli, ConstantTestsPerItem)):
        return scheme.t1
    if isinstance(scheme, DoublyConstant):
        return scheme.t1(n)
    if isinstance(scheme, Hypercube):
        return scheme.t1
    raise TypeError(f"unknown scheme {scheme!r}")


# --- generators ------------------------------------------------------------


def dorfman_design(n: int, s: int) -> PoolingDesign:
    """Split ``n`` items into ``n/s`` consecutive groups of exactly ``s``.

    Requires ``s | n``; grouping is deterministic (items are exchangeable,
    so randomizing the partition would not change outcome distributions).
    """
    if s < 1:
        raise ValueError(f"group size must be >= 1, got {s}")
    if s > n:
        raise ValueError(f"group size {s} exceeds item count {n}")
    if n % s != 0:
        raise ValueError(f"group size {s} must divide item count {n}")
    tests = tuple(
        frozenset(range(g * s, (g + 1) * s)) for g in range(n // s)
    )
    return PoolingDesign(n, tests)


def bernoulli_design(n: int, t1: int, pi: float, seed: Seed = None) -> PoolingDesign:
    """Include each (item, test) pair independently with probability ``pi``.

    Empty tests and untested items are allowed.
    """
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"inclusion probability must be in [0, 1], got {pi}")
    if t1 < 0:
        raise ValueError(f"test count must be non-negative, got {t1}")
    rng = np.random.default_rng(seed)
    incidence = rng.random((t1, n)) < pi
    tests = tuple(frozenset(np.flatnonzero(row).tolist()) for row in incidence)
    return PoolingDesign(n, tests)


def ctpi_design(n: int, t1: int, r: int, seed: Seed = None) -> PoolingDesign:
    """Assign each item to one uniform test in each of ``r`` rounds.

    The ``t1`` tests are split into ``r`` rounds of ``t1/r``; requires
    ``r | t1``.  Every item ends up in exactly ``r`` tests.
    """
    if r < 1:
        raise ValueError(f"tests per item must be >= 1, got {r}")
    if t1 % r != 0 or t1 // r < 1:
        raise ValueError(f"test count {t1} must be a positive multiple of r={r}")
    m = t1 // r
    rng = np.random.default_rng(seed)
    tests: list[set[int]] = [set() for _ in range(t1)]
    for rnd in range(r):
        assignment = rng.integers(0, m, size=n)
        for item, j in enumerate(assignment.tolist()):
            tests[rnd * m + j].add(item)
    return PoolingDesign(n, tuple(frozenset(t) for t in tests))


def doubly_constant_design(n: int, r: int, s: int, seed: Seed = None) -> PoolingDesign:
    """``r`` independent uniform partitions of the items into tests of size ``s``.

    Requires ``s | n``; gives ``n*r/s`` tests, every item in exactly ``r``
    of them and every test containing exactly ``s`` items.  Duplicate pools
    across rounds remain distinct tests.
    """
    if r < 1:
        raise ValueError(f"tests per item must be >= 1, got {r}")
    if s < 1:
        raise ValueError(f"items per test must be >= 1, got {s}")
    if n % s != 0:
        raise ValueError(f"items per test {s} must divide item count {n}")
    m = n // s
    rng = np.random.default_rng(seed)
    tests: list[frozenset[int]] = []
    for _ in range(r):
        perm = rng.permutation(n)
        tests.extend(
            frozenset(perm[j * s : (j + 1) * s].tolist()) for j in range(m)
        )
    return PoolingDesign(n, tuple(tests))


def hypercube_design(a: int, r2: int) -> HypercubeDesign:
    """Index ``a**r2`` items by coordinates; test (d, j) is a coordinate slice.

    Test ``d*a + j`` contains the items whose d-th coordinate equals j, so
    there are ``a*r2`` tests of ``a**(r2-1)`` items, each item in ``r2`` tests.
    """
    if a < 2:
        raise ValueError(f"side length must be >= 2, got {a}")
    if r2 < 1:
        raise ValueError(f"dimension must be >= 1, got {r2}")
    n = a**r2
    tests = []
    for d in range(r2):
        stride = a ** (r2 - 1 - d)
        for j in range(a):
            tests.append(frozenset(i for i in range(n) if (i // stride) % a == j))
    return HypercubeDesign(n, tuple(tests), a=a, r2=r2)


def hypercube_coords(item: int, a: int, r2: int) -> tuple[int, ...]:
    """Coordinates of ``item`` on the cube, most significant digit first."""
    if not 0 <= item < a**r2:
        raise ValueError(f"item {item} outside [0, {a**r2})")
    coords = []
    for d in range(r2):
        stride = a ** (r2 - 1 - d)
        coords.append((item // stride) % a)
    return tuple(coords)


def hypercube_item(coords: tuple[int, ...], a: int) -> int:
    """Inverse of :func:`hypercube_coords`."""
    item = 0
    for c in coords:
        if not 0 <= c < a:
            raise ValueError(f"coordinate {c} outside [0, {a})")
        item = item * a + c
    return item


def generate_design(scheme: SchemeConfig, n: int, seed: Seed = None) -> PoolingDesign:
    """Build the stage-one design of ``scheme`` for ``n`` items."""
    if isinstance(scheme, Individual):
        return PoolingDesign(n, ())
    if isinstance(scheme, Dorfman):
        return dorfman_design(n, scheme.s)
    if isinstance(scheme, Bernoulli):
        return bernoulli_design(n, scheme.t1, scheme.pi, seed)
    if isinstance(scheme, ConstantTestsPerItem):
        return ctpi_design(n, scheme.t1, scheme.r, seed)
    if isinstance(scheme, DoublyConstant):
        return doubly_constant_design(n, scheme.r, scheme.s, seed)
    if isinstance(scheme, Hypercube):
        if n != scheme.n:
            raise ValueError(f"hypercube({scheme.a}, {scheme.r2}) needs n={scheme.n}, got {n}")
        return hypercube_design(scheme.a, scheme.r2)
    raise TypeError(f"unknown scheme {scheme!r}")


def write_design_csv(design: PoolingDesign, path) -> None:
    """Dump incidence pairs as ``test_id,item_id`` rows sorted by (test, item)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("test_id,item_id\n")
        for t, members in enumerate(design.tests):
            for i in sorted(members):
                fh.write(f"{t},{i}\n")
