import math
from fractions import Fraction

import numpy as np
import pytest

from qadvice.separations import (
    AdvisedClassifier,
    advice_copies_for,
    classifiers_from_json,
    classifiers_to_json,
    counting_inequality,
    diagonal_sparse_set,
    majority_amplify,
    random_classifier,
    realized_sets,
    verify_escaping_set,
)


def test_counting_examples():
    r = counting_inequality(4, 1)
    assert (r.lhs, r.rhs, r.holds) == (137, 16, True)
    r = counting_inequality(1, 1)
    assert (r.lhs, r.rhs, r.holds) == (4, 2, True)
    r = counting_inequality(2, 2)  # boundary 2f = 2^n
    assert (r.lhs, r.rhs, r.holds) == (16, 16, False)


def test_counting_rejects_oversized_f():
    with pytest.raises(ValueError):
        counting_inequality(2, 3)


def test_counting_middle_bound_chain():
    # lhs > middle > rhs whenever the sufficient condition n > 2 + 2 log2 f holds
    for n in range(3, 13):
        for f in range(1, 5):
            if 2 * f > 2**n:
                continue
            r = counting_inequality(n, f)
            assert r.lhs == sum(math.comb(2**n, j) for j in range(2 * f + 1))
            assert r.rhs == 2 ** (f * n)
            if r.sufficient_condition:
                assert r.lhs > r.middle > r.rhs
                assert r.holds


def test_realized_sets_advice_ignoring_classifier():
    table = np.tile(np.array([[0.9], [0.1], [0.9], [0.1]]), (1, 4))
    c = AdvisedClassifier(id=0, n=2, advice_len=2, table=table)
    fam = realized_sets(c)
    assert len(fam.sets) == 1
    assert frozenset(["00", "10"]) in fam.sets


def test_realized_sets_echo_classifier_realizes_everything():
    # advice bit i directly decides input with index i: every subset appears
    n = 2
    advice_len = 2**n
    table = np.zeros((2**n, 2**advice_len))
    for s in range(2**advice_len):
        for x in range(2**n):
            table[x, s] = 1.0 if (s >> (2**n - 1 - x)) & 1 else 0.0
    c = AdvisedClassifier(id=1, n=n, advice_len=advice_len, table=table)
    assert len(realized_sets(c).sets) == 2 ** (2**n)


def test_realized_sets_random_family_size_capped():
    c = random_classifier(3, 3, np.random.default_rng(0), id=2)
    assert len(realized_sets(c).sets) <= 2**3


def test_realized_sets_scale_guard():
    with pytest.raises(ValueError):
        realized_sets(AdvisedClassifier(id=0, n=13, advice_len=13,
                                        table=np.zeros((2**13, 2**13))))


def test_diagonal_escapes_reject_all_classifier():
    table = np.zeros((4, 2))
    c = AdvisedClassifier(id=0, n=2, advice_len=1, table=table)
    found = diagonal_sparse_set([c], n=2, f=1)
    assert found == frozenset(["00"])  # first nonempty candidate escapes


def test_diagonal_not_found_when_everything_realized():
    # echo classifier realizes all subsets of {0,1}^2, so nothing of size <= 2f escapes
    n = 2
    table = np.zeros((4, 16))
    for s in range(16):
        for x in range(4):
            table[x, s] = float((s >> (3 - x)) & 1)
    c = AdvisedClassifier(id=0, n=n, advice_len=4, table=table)
    assert diagonal_sparse_set([c], n=n, f=2) is None


def test_diagonal_seeded_family_and_independent_verification():
    rng = np.random.default_rng(12)
    classifiers = [random_classifier(4, 4, rng, id=i) for i in range(4)]
    found = diagonal_sparse_set(classifiers, n=4, f=1)
    assert found is not None and len(found) <= 2
    assert verify_escaping_set(classifiers, found)


def test_verify_escaping_set_rejects_realized_candidate():
    table = np.tile(np.array([[0.9], [0.1], [0.9], [0.1]]), (1, 2))
    c = AdvisedClassifier(id=0, n=2, advice_len=1, table=table)
    assert not verify_escaping_set([c], frozenset(["00", "10"]))


def test_classifier_json_round_trip():
    rng = np.random.default_rng(5)
    cs = [random_classifier(2, 3, rng, id=i) for i in range(3)]
    back = classifiers_from_json(classifiers_to_json(cs))
    assert back == cs


def test_classifier_validation():
    with pytest.raises(ValueError):
        AdvisedClassifier(id=0, n=1, advice_len=1, table=np.zeros((2, 3)))
    with pytest.raises(ValueError):
        AdvisedClassifier(id=0, n=1, advice_len=1, table=np.full((2, 2), 1.5))


def test_majority_amplify_values():
    assert majority_amplify(Fraction(2, 3), 1) == Fraction(2, 3)
    assert majority_amplify(Fraction(1, 2), 99) == Fraction(1, 2)
    assert majority_amplify(Fraction(2, 3), 3) == Fraction(20, 27)


def test_majority_amplify_rejects_even_t():
    with pytest.raises(ValueError):
        majority_amplify(Fraction(2, 3), 4)


def test_majority_amplify_float_path():
    out = majority_amplify(0.9, 5)
    assert isinstance(out, float)
    assert abs(out - float(majority_amplify(Fraction(9, 10), 5))) < 1e-12


def test_majority_monotone_and_strict_until_saturation():
    # exact rational path: strictly increasing for 1/2 < p < 1
    prev = majority_amplify(Fraction(2, 3), 1)
    for t in range(3, 202, 2):
        cur = majority_amplify(Fraction(2, 3), t)
        assert cur > prev
        prev = cur
    # float paths: nondecreasing, strict until float saturation
    for p in (0.55, 0.9):
        prev = majority_amplify(p, 1)
        for t in range(3, 202, 2):
            cur = majority_amplify(p, t)
            assert cur >= prev - 1e-15
            if prev < 1.0 - 1e-9:
                assert cur > prev
            prev = cur


def test_majority_hoeffding_floor():
    for p in (0.55, 2 / 3, 0.9):
        for t in range(1, 202, 2):
            floor = 1.0 - math.exp(-2 * t * (p - 0.5) ** 2)
            assert float(majority_amplify(p, t)) >= floor - 1e-12


def test_advice_copies_for_examples():
    # t = 1 is never enough for epsilon strictly below 1/3 (tail at t=1 is 2/3);
    # the first odd t whose exact tail reaches 1 - eps is 3
    assert advice_copies_for(Fraction(1, 3) - Fraction(1, 10**9)) == 3
    t = advice_copies_for(Fraction(1, 2**10))
    assert majority_amplify(Fraction(2, 3), t) >= 1 - Fraction(1, 2**10)
    assert majority_amplify(Fraction(2, 3), t - 2) < 1 - Fraction(1, 2**10)


def test_advice_copies_for_domain():
    with pytest.raises(ValueError):
        advice_copies_for(Fraction(1, 3))
    with pytest.raises(ValueError):
        advice_copies_for(Fraction(0))


def test_advice_copies_monte_carlo_cross_check():
    eps = 0.05
    t = advice_copies_for(Fraction(1, 20))
    exact = float(majority_amplify(Fraction(2, 3), t))
    assert exact >= 0.95
    rng = np.random.default_rng(2718)
    trials = 1_000_000
    wins = rng.binomial(t, 2 / 3, size=trials) > t // 2
    freq = wins.mean()
    sigma = math.sqrt(exact * (1 - exact) / trials)
    assert abs(freq - exact) <= 3 * sigma
