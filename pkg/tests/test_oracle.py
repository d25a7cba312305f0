import itertools
import math
import random
from fractions import Fraction

import pytest

from ctsw import oracle
from ctsw.kt import kt_sequence


def test_suffix_set_counts():
    assert [len(oracle.enumerate_suffix_sets(d)) for d in range(5)] == [1, 2, 5, 26, 677]


def test_enumeration_limits():
    with pytest.raises(ValueError):
        oracle.enumerate_suffix_sets(5)
    with pytest.raises(ValueError):
        oracle.enumerate_suffix_sets(-1)


def test_enumerated_sets_are_proper_and_complete():
    for d in range(4):
        sets = oracle.enumerate_suffix_sets(d)
        assert len(set(sets)) == len(sets)
        for S in sets:
            assert oracle.is_proper(S)
            assert oracle.is_complete(S)
            assert oracle.suffix_set_depth(S) <= d


def test_structure_code_is_complete():
    for d in range(5):
        total = sum(Fraction(1, 2 ** oracle.structure_cost(S, d)) for S in oracle.enumerate_suffix_sets(d))
        assert total == 1


def test_structure_cost_examples():
    S = frozenset({"1", "10", "00"})
    assert oracle.structure_cost(S, 3) == 5
    assert oracle.structure_cost(S, 2) == 3
    assert oracle.structure_cost(frozenset({""}), 0) == 0
    assert oracle.structure_cost(frozenset({""}), 2) == 1


def test_gamma():
    assert oracle.gamma(0) == 0
    assert oracle.gamma(0.5) == 0.5
    assert oracle.gamma(1) == 1
    assert oracle.gamma(1 - 1e-12) == pytest.approx(oracle.gamma(1))
    assert oracle.gamma(16) == pytest.approx(3)
    with pytest.raises(ValueError):
        oracle.gamma(-1)


def test_context_positions_use_zero_padding():
    # padding "00": x1 sees "0", x2 sees "1"
    assert oracle.context_positions([1, 1], "0", 1) == [1]
    assert oracle.context_positions([1, 1], "1", 1) == [2]
    assert oracle.subsequence([1, 0, 1], "", 2) == [1, 0, 1]


def test_brute_ctw_depth_zero_is_kt():
    bits = [1, 0, 0, 1, 1]
    assert oracle.brute_ctw(bits, 0) == oracle.kt_probability(bits)


def test_brute_ctw_is_a_distribution():
    for n in range(5):
        total = sum(oracle.brute_ctw(x, 2) for x in itertools.product((0, 1), repeat=n))
        assert total == 1


def test_brute_cts_basics():
    assert oracle.brute_cts([], 1) == 1
    bits = [0, 1, 1]
    assert oracle.brute_cts(bits, 0) == oracle.kt_probability(bits)
    for n in range(5):
        total = sum(oracle.brute_cts(x, 1) for x in itertools.product((0, 1), repeat=n))
        assert total == 1
    with pytest.raises(ValueError):
        oracle.brute_cts([0] * 11, 1)


def test_brute_switch_is_a_distribution():
    models = [lambda h, s: Fraction(1, 4) if s else Fraction(3, 4), lambda h, s: Fraction(1, 2)]
    total = sum(oracle.brute_switch(x, models) for x in itertools.product((0, 1), repeat=4))
    assert total == 1


def test_brute_prior_sums_to_one():
    for n_models in (2, 3):
        for n in range(5):
            seqs = itertools.product(range(1, n_models + 1), repeat=n)
            assert sum(oracle.brute_prior(s, n_models) for s in seqs) == 1


def test_pst_validation():
    with pytest.raises(ValueError):
        oracle.PstModel(frozenset({"1", "01"}), {"1": 0.5, "01": 0.5})
    with pytest.raises(ValueError):
        oracle.PstModel(frozenset({"1", "10"}), {"1": 0.5, "10": 0.5})
    with pytest.raises(ValueError):
        oracle.PstModel(frozenset({"0", "1"}), {"0": 0.5, "1": 1.5})
    with pytest.raises(ValueError):
        oracle.PstModel(frozenset({"0", "1"}), {"0": 0.5})


def test_pst_context_lookup():
    pst = oracle.EXAMPLE_PST
    assert pst.depth == 2
    assert pst.context_of([]) == "00"
    assert pst.context_of([1]) == "1"
    assert pst.context_of([1, 0]) == "10"
    assert pst.context_of([0, 1, 0, 0]) == "00"
    deep = oracle.PstModel(frozenset({"00", "010", "110", "1"}), {"00": 0.5, "010": 0.5, "110": 0.5, "1": 0.5})
    # short histories are left-padded with zeros
    assert deep.context_of([1, 0]) == "010"
    assert deep.context_of([0]) == "00"


def test_pst_counts_agree_with_subsequences():
    pst = oracle.PstModel(frozenset({"00", "010", "110", "1"}), {"00": 0.9, "010": 0.2, "110": 0.1, "1": 0.4})
    bits = oracle.pst_sample(pst, 300, seed=3)
    for s, (a, b) in oracle.pst_counts(pst, bits).items():
        sub = oracle.subsequence(bits, s, 3)
        assert (sub.count(0), sub.count(1)) == (a, b)


def test_pst_sample_deterministic_and_degenerate():
    pst = oracle.PstModel(frozenset({"0", "1"}), {"0": 1.0, "1": 1.0})
    assert oracle.pst_sample(pst, 50, seed=1) == [1] * 50
    assert oracle.pst_log_prob(pst, [1] * 50) == 0
    assert oracle.pst_log_prob(pst, [1, 0]) == -math.inf
    f = oracle.EXAMPLE_PST
    assert oracle.pst_sample(f, 100, 4) == oracle.pst_sample(f, 100, 4)


def test_pst_sample_fair_coin():
    pst = oracle.PstModel(frozenset({""}), {"": 0.5})
    n = 20_000
    ones = sum(oracle.pst_sample(pst, n, seed=7))
    assert abs(ones - n / 2) <= 3 * math.sqrt(n / 4)
    assert oracle.pst_log_prob(pst, [0, 1, 1]) == pytest.approx(-3)


def test_example_pst_conditional_frequencies():
    pst = oracle.EXAMPLE_PST
    bits = oracle.pst_sample(pst, 100_000, seed=2012)
    for s, (a, b) in oracle.pst_counts(pst, bits).items():
        n = a + b
        theta = pst.params[s]
        assert abs(b / n - theta) <= 3 * math.sqrt(theta * (1 - theta) / n)


def test_pst_log_prob_matches_counts():
    pst = oracle.EXAMPLE_PST
    bits = oracle.pst_sample(pst, 500, seed=3)
    direct = 0.0
    for t, bit in enumerate(bits):
        theta = pst.params[pst.context_of(bits[:t])]
        direct += math.log2(theta if bit else 1 - theta)
    assert oracle.pst_log_prob(pst, bits) == pytest.approx(direct, abs=1e-9)


def test_parameter_redundancy_known_structure():
    grid = [i / 10 for i in range(11)]
    for S in oracle.enumerate_suffix_sets(2):
        size = len(S)
        for n in range(1, 13):
            for x in itertools.product((0, 1), repeat=n):
                lhs = 0.0
                for s in S:
                    sub = oracle.subsequence(x, s, 2)
                    b = sum(sub)
                    a = len(sub) - b
                    best = max(
                        (b * math.log2(t) if b else 0.0) + (a * math.log2(1 - t) if a else 0.0)
                        for t in grid
                        if not ((t == 0 and b) or (t == 1 and a))
                    )
                    lhs += best - kt_sequence(sub).log_prob
                assert lhs <= size * oracle.gamma(n / size) + 1e-9


def test_bound_report_terms():
    pst = oracle.EXAMPLE_PST
    bits = oracle.pst_sample(pst, 64, seed=0)
    rep = oracle.bound_report(pst, bits, 3, realized=10.0)
    assert rep.model_cost == 5
    assert rep.switch_cost == pytest.approx(3 * 6)
    assert rep.param_cost == pytest.approx(3 * oracle.gamma(64 / 3))
    assert rep.data_cost == pytest.approx(-oracle.pst_log_prob(pst, bits))
    assert rep.cts_bound - rep.ctw_bound == pytest.approx(rep.switch_cost)
    assert rep.holds(switching=False)


def test_random_pst_uses_grid():
    rng = random.Random(1)
    pst = oracle.random_pst(oracle.EXAMPLE_PST.suffix_set, rng)
    assert all(v in [i / 10 for i in range(11)] for v in pst.params.values())
