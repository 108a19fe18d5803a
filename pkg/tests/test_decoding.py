import itertools

import numpy as np
import pytest

from conftest import random_defectives, random_design
from twostagegt.decoding import (
    classify,
    dd_set,
    dnd_set,
    hypercube_decode,
    run_tests,
    stage2_count,
)
from twostagegt.designs import (
    PoolingDesign,
    hypercube_design,
    hypercube_item,
)


@pytest.fixture
def chain_design():
    # tests {0,1} and {1,2}
    return PoolingDesign(3, (frozenset({0, 1}), frozenset({1, 2})))


class TestRunTests:
    def test_positive_iff_contains_defective(self, chain_design):
        assert run_tests(chain_design, {0}) == [True, False]

    def test_no_defectives_all_negative(self, chain_design):
        assert run_tests(chain_design, set()) == [False, False]

    def test_empty_test_is_negative(self):
        d = PoolingDesign(2, (frozenset(), frozenset({0})))
        assert run_tests(d, {0, 1}) == [False, True]

    def test_hypercube_slices(self):
        d = hypercube_design(3, 2)
        item = hypercube_item((1, 2), 3)
        outcomes = run_tests(d, {item})
        positives = {t for t, pos in enumerate(outcomes) if pos}
        assert positives == {0 * 3 + 1, 1 * 3 + 2}

    def test_rejects_out_of_range(self, chain_design):
        with pytest.raises(ValueError):
            run_tests(chain_design, {3})


class TestDndSet:
    def test_negative_test_members(self, chain_design):
        assert dnd_set(chain_design, [True, False]) == {1, 2}

    def test_all_negative_collects_every_tested_item(self, chain_design):
        assert dnd_set(chain_design, [False, False]) == {0, 1, 2}

    def test_untested_item_never_dnd(self):
        d = PoolingDesign(3, (frozenset({0, 1}),))  # item 2 untested
        assert 2 not in dnd_set(d, [False])

    def test_length_mismatch(self, chain_design):
        with pytest.raises(ValueError):
            dnd_set(chain_design, [True])


class TestDdSet:
    def test_single_remaining_item(self, chain_design):
        outcomes = run_tests(chain_design, {0})
        assert dd_set(chain_design, outcomes) == {0}

    def test_no_dd_when_everything_positive(self, chain_design):
        outcomes = run_tests(chain_design, {0, 2})
        assert outcomes == [True, True]
        assert dd_set(chain_design, outcomes) == frozenset()

    def test_positive_singleton_test(self):
        d = PoolingDesign(4, (frozenset({3}),))
        assert dd_set(d, [True]) == {3}


class TestStage2Count:
    def test_chain_example(self, chain_design):
        outcomes = run_tests(chain_design, {0})
        assert stage2_count(chain_design, outcomes, "conservative") == 1
        assert stage2_count(chain_design, outcomes, "nonconservative") == 0

    def test_no_first_stage_retests_everything(self):
        d = PoolingDesign(5, ())
        assert stage2_count(d, [], "conservative") == 5

    def test_all_clear_with_full_coverage(self):
        d = PoolingDesign(4, (frozenset({0, 1}), frozenset({2, 3})))
        assert stage2_count(d, [False, False], "conservative") == 0

    def test_rejects_unknown_mode(self, chain_design):
        with pytest.raises(ValueError):
            stage2_count(chain_design, [True, False], "other")


class TestClassify:
    def test_identities_hold(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            design = random_design(rng)
            defectives = random_defectives(rng, design.n)
            cls = classify(design, run_tests(design, defectives))
            assert cls.dnd.isdisjoint(cls.dd)
            assert cls.stage2_conservative == design.n - len(cls.dnd)
            assert cls.stage2_nonconservative == design.n - len(cls.dnd) - len(cls.dd)
            assert cls.stage2_conservative >= cls.stage2_nonconservative


class TestHypercubeDecode:
    def test_resolves_single_defective(self):
        d = hypercube_design(3, 2)
        item = hypercube_item((1, 2), 3)
        res = hypercube_decode(d, run_tests(d, {item}))
        assert res.status == "resolved"
        assert res.item == item

    def test_all_clear(self):
        d = hypercube_design(3, 2)
        assert hypercube_decode(d, run_tests(d, set())).status == "all_clear"

    def test_diagonal_pair_unresolved_and_ambiguous(self):
        d = hypercube_design(3, 2)
        k1 = {hypercube_item((0, 0), 3), hypercube_item((1, 1), 3)}
        k2 = {hypercube_item((0, 1), 3), hypercube_item((1, 0), 3)}
        out1 = run_tests(d, k1)
        # the swapped pair produces the identical outcome vector
        assert out1 == run_tests(d, k2)
        assert hypercube_decode(d, out1).status == "unresolved"

    def test_resolved_reproduces_outcomes(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a = int(rng.integers(2, 5))
            r2 = int(rng.integers(1, 4))
            d = hypercube_design(a, r2)
            defectives = random_defectives(rng, d.n)
            outcomes = run_tests(d, defectives)
            res = hypercube_decode(d, outcomes)
            if res.status == "resolved":
                assert run_tests(d, {res.item}) == outcomes


def test_soundness_fuzz():
    """DNDs are never defective and DDs always are, over random instances."""
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        design = random_design(rng)
        defectives = random_defectives(rng, design.n)
        outcomes = run_tests(design, defectives)
        dnd = dnd_set(design, outcomes)
        dd = dd_set(design, outcomes, dnd=dnd)
        assert dnd.isdisjoint(defectives)
        assert dd <= defectives


def test_monotonicity_in_defectives():
    """An extra defective never shrinks positives and never grows the DND set."""
    rng = np.random.default_rng(13)
    for _ in range(2000):
        design = random_design(rng)
        if design.n < 2:
            continue
        defectives = set(random_defectives(rng, design.n))
        extra = int(rng.integers(0, design.n))
        bigger = defectives | {extra}
        out_small = run_tests(design, defectives)
        out_big = run_tests(design, bigger)
        assert all(b or not s for s, b in zip(out_small, out_big))
        assert dnd_set(design, out_big) <= dnd_set(design, out_small)


def test_stage2_against_exhaustive_reference():
    """Decoder counts match a from-scratch enumeration on every defective set."""
    rng = np.random.default_rng(5)
    designs = [random_design(rng) for _ in range(40)]
    designs = [d for d in designs if 1 <= d.n <= 10][:12]
    assert len(designs) >= 5
    for design in designs:
        for bits in itertools.product([0, 1], repeat=design.n):
            defectives = {i for i, b in enumerate(bits) if b}
            outcomes = [
                any(i in defectives for i in members) for members in design.tests
            ]
            dnd_ref = {
                i
                for i in range(design.n)
                if any(
                    not outcomes[t] for t, members in enumerate(design.tests) if i in members
                )
            }
            dd_ref = set()
            for t, members in enumerate(design.tests):
                if not outcomes[t]:
                    continue
                for i in members:
                    if all(j in dnd_ref for j in members if j != i):
                        dd_ref.add(i)
            assert stage2_count(design, outcomes, "conservative") == design.n - len(dnd_ref)
            assert stage2_count(design, outcomes, "nonconservative") == design.n - len(
                dnd_ref
            ) - len(dd_ref)
