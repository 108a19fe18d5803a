import math
from fractions import Fraction

import numpy as np
import pytest

from twostagegt.designs import (
    Bernoulli,
    ConstantTestsPerItem,
    Dorfman,
    DoublyConstant,
    Individual,
)
from twostagegt.simulate import (
    FixedKPrior,
    IIDPrior,
    TABLE1_ROWS,
    aggregate_totals,
    decile,
    derive_seed,
    exact_dc_fixed_k_et2,
    run_experiment,
    run_trial,
    sample_defectives,
    table1_preset,
    write_summary_csv,
    write_trials_csv,
)


class TestSampleDefectives:
    def test_zero_prevalence(self):
        assert sample_defectives(IIDPrior(0.0), 50, seed=1) == frozenset()

    def test_full_fixed_k(self):
        assert sample_defectives(FixedKPrior(8), 8, seed=1) == frozenset(range(8))

    def test_fixed_k_size(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert len(sample_defectives(FixedKPrior(5), 40, rng)) == 5

    def test_rejects_k_above_n(self):
        with pytest.raises(ValueError):
            sample_defectives(FixedKPrior(9), 8, seed=1)

    def test_iid_mean_count(self):
        reps, n, p = 10_000, 1000, 0.027
        total = sum(
            len(sample_defectives(IIDPrior(p), n, seed=derive_seed(42, i)))
            for i in range(reps)
        )
        se = math.sqrt(n * p * (1 - p) / reps)
        assert abs(total / reps - n * p) < 3 * se

    def test_deterministic_given_seed(self):
        a = sample_defectives(IIDPrior(0.3), 100, seed=7)
        b = sample_defectives(IIDPrior(0.3), 100, seed=7)
        assert a == b


class TestRunTrial:
    def test_individual_always_costs_n(self):
        for seed in range(5):
            r = run_trial(Individual(), IIDPrior(0.027), 1000, seed=seed)
            assert (r.t1, r.t2, r.total) == (0, 1000, 1000)

    def test_dorfman_all_clear(self):
        r = run_trial(Dorfman(s=7), IIDPrior(0.0), 1001, seed=3)
        assert r.total == 143
        assert r.defective_count == 0

    def test_deterministic_given_seed(self):
        a = run_trial(DoublyConstant(r=4, s=25), IIDPrior(0.027), 1000, seed=11)
        b = run_trial(DoublyConstant(r=4, s=25), IIDPrior(0.027), 1000, seed=11)
        assert a == b

    def test_conservative_dominates_nonconservative(self):
        for seed in range(50):
            cons = run_trial(
                DoublyConstant(r=2, s=5), FixedKPrior(3), 20, "conservative", seed
            )
            noncons = run_trial(
                DoublyConstant(r=2, s=5), FixedKPrior(3), 20, "nonconservative", seed
            )
            assert cons.t2 >= noncons.t2
            assert cons.t2 >= cons.defective_count

    def test_total_is_sum(self):
        r = run_trial(Bernoulli(pi=0.05, t1=12), IIDPrior(0.1), 60, seed=2)
        assert r.total == r.t1 + r.t2


class TestAggregation:
    def test_decile_rule_on_known_array(self):
        totals = list(range(1, 11))  # 1..10
        assert decile(sorted(totals), 0.1) == 1
        assert decile(sorted(totals), 0.9) == 9

    def test_single_trial(self):
        mean, d10, d90 = aggregate_totals([37])
        assert (mean, d10, d90) == (37.0, 37, 37)

    def test_order_independence(self):
        rng = np.random.default_rng(4)
        totals = rng.integers(100, 400, size=501).tolist()
        shuffled = list(totals)
        rng.shuffle(shuffled)
        assert aggregate_totals(totals) == aggregate_totals(shuffled)

    def test_deciles_ordered(self):
        rng = np.random.default_rng(9)
        totals = rng.integers(0, 1000, size=333).tolist()
        _, d10, d90 = aggregate_totals(totals)
        assert d10 <= d90

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            aggregate_totals([])


class TestRunExperiment:
    def test_single_trial_summary(self):
        summary, results = run_experiment(
            Dorfman(s=5), IIDPrior(0.05), 100, trials=1, master_seed=3
        )
        assert len(results) == 1
        assert summary.mean_total == results[0].total
        assert summary.decile10 == summary.decile90 == results[0].total

    def test_theory_comparator(self):
        summary, _ = run_experiment(
            DoublyConstant(r=4, s=25), IIDPrior(0.027), 1000, trials=2, master_seed=0
        )
        assert summary.theory_total == pytest.approx(239.3206, abs=1e-3)

    def test_theory_n_override(self):
        summary, _ = run_experiment(
            Dorfman(s=7), IIDPrior(0.027), 1001, trials=2, master_seed=0, theory_n=1000
        )
        assert summary.theory_total == pytest.approx(317.2187, abs=1e-3)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            run_experiment(Individual(), IIDPrior(0.1), 10, trials=0)

    def test_reproducible(self):
        run = lambda: run_experiment(
            Bernoulli(pi=1 / 27, t1=190), IIDPrior(0.027), 1000, trials=20, master_seed=5
        )
        assert run() == run()


class TestExactOracle:
    def test_reference_instance(self):
        # independent arithmetic: C(17,4) = 2380, C(19,4) = 3876
        hyp = Fraction(2380, 3876)
        expected = 2 + 18 * float((1 - hyp)) ** 2
        assert expected == pytest.approx(4.6814404, abs=1e-6)
        assert exact_dc_fixed_k_et2(20, 2, 2, 5) == pytest.approx(expected, abs=1e-12)

    def test_no_defectives(self):
        assert exact_dc_fixed_k_et2(20, 0, 3, 5) == 0.0

    def test_all_defective(self):
        assert exact_dc_fixed_k_et2(20, 20, 3, 5) == 20.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            exact_dc_fixed_k_et2(20, 21, 2, 5)
        with pytest.raises(ValueError):
            exact_dc_fixed_k_et2(20, 2, 2, 6)

    def test_monte_carlo_agreement_quick(self):
        # full-size agreement check lives in the acceptance suite
        trials = 20_000
        t2s = [
            run_trial(
                DoublyConstant(r=2, s=5), FixedKPrior(2), 20, seed=derive_seed(77, i)
            ).t2
            for i in range(trials)
        ]
        mean = sum(t2s) / trials
        se = np.std(t2s, ddof=1) / math.sqrt(trials)
        assert abs(mean - exact_dc_fixed_k_et2(20, 2, 2, 5)) < 3 * se


class TestTable1Preset:
    def test_rows_and_stage_one_counts(self):
        runs = table1_preset(master_seed=2, trials=40)
        assert [s.t1 for s, _ in runs] == [0, 143, 190, 160, 160]
        assert [s.scheme for s, _ in runs] == [scheme for scheme, _ in TABLE1_ROWS]
        assert [s.n for s, _ in runs] == [1000, 1001, 1000, 1000, 1000]

    def test_theory_column_at_common_baseline(self):
        runs = table1_preset(master_seed=2, trials=2)
        theory_totals = [s.theory_total for s, _ in runs]
        assert theory_totals[0] == 1000.0
        assert theory_totals[1] == pytest.approx(317.2187, abs=1e-3)
        assert theory_totals[2] == pytest.approx(290.0835, abs=1e-3)
        assert theory_totals[3] == pytest.approx(243.4788, abs=1e-3)
        assert theory_totals[4] == pytest.approx(239.3206, abs=1e-3)

    def test_individual_row_exact(self):
        runs = table1_preset(master_seed=0, trials=30)
        summary = runs[0][0]
        assert summary.mean_total == 1000.0
        assert summary.decile10 == summary.decile90 == 1000


class TestCsvWriters:
    def test_trials_csv(self, tmp_path):
        _, results = run_experiment(
            Dorfman(s=3), IIDPrior(0.2), 9, trials=3, master_seed=1
        )
        path = tmp_path / "trials.csv"
        write_trials_csv(path, [("dorfman", results)])
        lines = path.read_text().splitlines()
        assert lines[0] == "scheme,trial,defectives,t1,t2,total"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "dorfman"
        assert int(first[3]) + int(first[4]) == int(first[5])

    def test_summary_csv(self, tmp_path):
        summary, _ = run_experiment(
            Dorfman(s=3), IIDPrior(0.2), 9, trials=3, master_seed=1
        )
        path = tmp_path / "summary.csv"
        write_summary_csv(path, [summary])
        lines = path.read_text().splitlines()
        assert lines[0] == "scheme,n,p,trials,t1,mean,decile10,decile90,theory"
        row = lines[1].split(",")
        assert row[0] == "dorfman"
        assert row[1] == "9"
        assert row[3] == "3"


def test_derive_seed_is_stable_and_spread():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    seeds = {derive_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2**64 for s in seeds)
