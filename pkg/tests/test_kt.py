import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ctsw.kt import KtCounts, kt_predict, kt_sequence, kt_update
from ctsw.oracle import kt_closed_form, kt_probability


def test_fresh_prediction_is_half():
    assert kt_predict(KtCounts(), 1) == 0.5
    assert kt_predict(KtCounts(), 0) == 0.5


def test_predict_after_one_zero():
    assert kt_predict(KtCounts(1, 0), 0) == 0.75


def test_predict_direct_formula():
    assert kt_predict(KtCounts(4, 2), 1) == pytest.approx(2.5 / 7, abs=1e-12)


def test_sequence_01():
    assert kt_sequence([0, 1]).log_prob == pytest.approx(math.log2(1 / 8), abs=1e-12)


def test_sequence_0000():
    assert 2 ** kt_sequence([0, 0, 0, 0]).log_prob == pytest.approx(35 / 128, rel=1e-12)


def test_scaled_update_order():
    c = kt_update(KtCounts(), 0, scale=0.98)
    assert c.a == pytest.approx(0.98)
    assert c.b == 0
    assert c.log_prob == -1.0


def test_bad_scale_rejected():
    with pytest.raises(ValueError):
        kt_update(KtCounts(), 1, scale=0.0)
    with pytest.raises(ValueError):
        kt_update(KtCounts(), 1, scale=1.5)


def test_log_prob_strictly_decreases():
    c = KtCounts()
    rng = random.Random(3)
    for _ in range(200):
        nxt = kt_update(c, rng.randint(0, 1), scale=0.98)
        assert nxt.log_prob < c.log_prob
        assert nxt.a >= 0 and nxt.b >= 0
        c = nxt


@given(st.lists(st.integers(0, 1), max_size=40))
def test_exchangeable(bits):
    shuffled = sorted(bits)
    assert kt_sequence(bits).log_prob == pytest.approx(kt_sequence(shuffled).log_prob, abs=1e-9)


@given(st.floats(0, 50), st.floats(0, 50))
def test_normalized(a, b):
    c = KtCounts(a, b)
    assert abs(kt_predict(c, 0) + kt_predict(c, 1) - 1.0) <= 2.3e-16


@given(st.lists(st.integers(0, 1), max_size=60))
def test_chain_rule(bits):
    c = KtCounts()
    total = 0.0
    for bit in bits:
        total += math.log2(kt_predict(c, bit))
        c = kt_update(c, bit)
    assert total == pytest.approx(c.log_prob, abs=1e-12)


def test_matches_exact_and_beta_integral():
    for bits in itertools.product((0, 1), repeat=7):
        exact = kt_probability(bits)
        assert 2 ** kt_sequence(bits).log_prob == pytest.approx(float(exact), rel=1e-12)
        a = bits.count(0)
        assert kt_closed_form(a, len(bits) - a) == pytest.approx(float(exact), rel=1e-10)


def test_kt_probability_empty():
    assert kt_probability([]) == Fraction(1)


def test_redundancy_bound_small():
    grid = [i / 10 for i in range(11)]
    for n in range(1, 11):
        for bits in itertools.product((0, 1), repeat=n):
            lp = kt_sequence(bits).log_prob
            b = sum(bits)
            a = n - b
            for theta in grid:
                if (theta == 0 and b) or (theta == 1 and a):
                    continue
                ideal = b * math.log2(theta) if b else 0.0
                ideal += a * math.log2(1 - theta) if a else 0.0
                assert ideal - lp <= 0.5 * math.log2(n) + 1 + 1e-12
