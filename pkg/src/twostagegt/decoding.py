"""Stage-one outcome computation and item classification.

Tests are noiseless: a pool is positive iff it contains a defective.
An item seen in any negative test is a definite nondefective (DND); an
item in a positive test whose other members are all DND is a definite
defective (DD).  Conservative stage two retests every non-DND item,
non-conservative stage two skips the DDs as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .designs import HypercubeDesign, PoolingDesign, hypercube_coords, hypercube_item

Mode = Literal["conservative", "nonconservative"]

MODES: tuple[Mode, ...] = ("conservative", "nonconservative")


@dataclass(frozen=True)
class Classification:
    """DND/DD split of the items plus the implied stage-two test counts."""

    dnd: frozenset[int]
    dd: frozenset[int]
    stage2_conservative: int
    stage2_nonconservative: int


@dataclass(frozen=True)
class HypercubeResult:
    """Decode of a hypercube slice design: no defectives, one item, or ambiguous."""

    status: Literal["all_clear", "resolved", "unresolved"]
    item: int | None = None


def _check_outcomes(design: PoolingDesign, outcomes: Sequence[bool]) -> None:
    if len(outcomes) != design.t1:
        raise ValueError(
            f"expected {design.t1} outcomes, got {len(outcomes)}"
        )


def run_tests(design: PoolingDesign, defectives: Iterable[int]) -> list[bool]:
    """Outcome vector: test t is positive iff it contains a defective.

    Empty tests are negative.
    """
    defective_set = frozenset(int(i) for i in defectives)
    for i in defective_set:
        if not 0 <= i < design.n:
            raise ValueError(f"defective item {i} outside [0, {design.n})")
    return [not members.isdisjoint(defective_set) for members in design.tests]


def dnd_set(design: PoolingDesign, outcomes: Sequence[bool]) -> frozenset[int]:
    """Items appearing in at least one negative test.

    Untested items are never DND.
    """
    _check_outcomes(design, outcomes)
    negatives = [design.tests[t] for t, pos in enumerate(outcomes) if not pos]
    if not negatives:
        return frozenset()
    return frozenset().union(*negatives)


def dd_set(
    design: PoolingDesign,
    outcomes: Sequence[bool],
    dnd: frozenset[int] | None = None,
) -> frozenset[int]:
    """Items in some positive test whose other members are all DND.

    A positive singleton test makes its item DD.  Computed in a single
    pass; no iterated elimination.
    """
    _check_outcomes(design, outcomes)
    if dnd is None:
        dnd = dnd_set(design, outcomes)
    dd: set[int] = set()
    for t, pos in enumerate(outcomes):
        if not pos:
            continue
        non_dnd = [i for i in design.tests[t] if i not in dnd]
        if len(non_dnd) == 1:
            dd.add(non_dnd[0])
        elif not non_dnd:
            # Every member already DND: each qualifies.  Unreachable for
            # outcome vectors produced by run_tests.
            dd.update(design.tests[t])
    return frozenset(dd)


def classify(design: PoolingDesign, outcomes: Sequence[bool]) -> Classification:
    """DND/DD sets and the stage-two counts for both retesting modes."""
    dnd = dnd_set(design, outcomes)
    dd = dd_set(design, outcomes, dnd=dnd)
    return Classification(
        dnd=dnd,
        dd=dd,
        stage2_conservative=design.n - len(dnd),
        stage2_nonconservative=design.n - len(dnd) - len(dd),
    )


def stage2_count(
    design: PoolingDesign, outcomes: Sequence[bool], mode: Mode = "conservative"
) -> int:
    """Number of individual stage-two tests required under ``mode``."""
    _check_outcomes(design, outcomes)
    dnd = dnd_set(design, outcomes)
    if mode == "conservative":
        return design.n - len(dnd)
    if mode == "nonconservative":
        return design.n - len(dnd) - len(dd_set(design, outcomes, dnd=dnd))
    raise ValueError(f"unknown mode {mode!r}")


def hypercube_decode(
    design: HypercubeDesign, outcomes: Sequence[bool]
) -> HypercubeResult:
    """Decode slice outcomes: all negative -> all_clear; a unique positive
    slice in every dimension -> that coordinate intersection; anything
    else needs further testing."""
    _check_outcomes(design, outcomes)
    a, r2 = design.a, design.r2
    positive_slices: list[list[int]] = []
    for d in range(r2):
        positive_slices.append([j for j in range(a) if outcomes[d * a + j]])
    if all(not slices for slices in positive_slices):
        return HypercubeResult("all_clear")
    if all(len(slices) == 1 for slices in positive_slices):
        coords = tuple(slices[0] for slices in positive_slices)
        return HypercubeResult("resolved", item=hypercube_item(coords, a))
    return HypercubeResult("unresolved")


__all__ = [
    "Classification",
    "HypercubeResult",
    "Mode",
    "MODES",
    "run_tests",
    "dnd_set",
    "dd_set",
    "classify",
    "stage2_count",
    "hypercube_decode",
    "hypercube_coords",
]
