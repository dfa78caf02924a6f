import math
from fractions import Fraction

import numpy as np
import pytest

from qadvice.fingerprint import (
    ADVICE_LENGTH_CONSTANT,
    acceptance_probability,
    advice_from_json,
    advice_to_json,
    build_advice,
    make_fingerprint,
    membership_probability_on_states,
    membership_test,
    sample_decision,
    soundness_bound,
)


def random_members(rng, n, count):
    out = set()
    while len(out) < count:
        out.add("".join(rng.choice(["0", "1"], size=n)))
    return sorted(out)


def test_make_fingerprint_example_field_and_state():
    fp = make_fingerprint("10", Fraction(1, 4))
    assert fp.field.q == 11  # least prime above ceil(2 / (1/4)) = 8
    assert fp.state.n == 2 * math.ceil(math.log2(11))
    support = fp.state.uniform_support
    assert len(support) == 11
    amp = 1 / math.sqrt(11)
    for i in support:
        assert abs(fp.state.amplitudes[i] - amp) < 1e-12


def test_make_fingerprint_zero_string_second_register():
    fp = make_fingerprint("0000", Fraction(1, 2))
    width = fp.register_width
    for idx in fp.state.uniform_support:
        assert idx & ((1 << width) - 1) == 0  # value register is |0...0>


def test_make_fingerprint_deterministic():
    a = make_fingerprint("1011", Fraction(1, 3))
    b = make_fingerprint("1011", Fraction(1, 3))
    assert a == b
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)


def test_make_fingerprint_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        make_fingerprint("10", 0)
    with pytest.raises(ValueError):
        make_fingerprint("10", Fraction(-1, 4))


def test_build_advice_examples():
    adv = build_advice(["11"], n=2, f=1)
    assert adv.field.q == 17  # k = 4, least prime above 16
    assert adv.m == 1

    adv8 = build_advice(random_members(np.random.default_rng(0), 8, 4), n=8, f=2)
    assert adv8.field.q == 131
    assert adv8.field.q >= 8 * 8 * 2


def test_build_advice_empty_member_set():
    adv = build_advice([], n=4, f=1)
    assert adv.m == 0
    assert adv.marker.n == 1
    assert np.allclose(adv.marker.amplitudes, [0, 1])
    res = membership_test("0000", adv, seed=1)
    assert res.acceptance_probability == 0 and res.decision is False


def test_build_advice_rejects_budget_and_malformed_members():
    with pytest.raises(ValueError):
        build_advice(["00", "01", "10"], n=2, f=1)  # 3 > 2f
    with pytest.raises(ValueError):
        build_advice(["00", "00"], n=2, f=2)  # duplicate
    with pytest.raises(ValueError):
        build_advice(["000"], n=2, f=1)  # wrong length


def test_membership_member_is_certain():
    adv = build_advice(["11", "01"], n=2, f=1)
    for y in adv.members:
        res = membership_test(y, adv, seed=3)
        assert res.acceptance_probability == 1
        assert res.decision is True


def test_membership_example_probability_1_over_17():
    adv = build_advice(["11"], n=2, f=1)
    res = membership_test("10", adv, seed=5)
    assert res.acceptance_probability == Fraction(1, 17)


def test_membership_rejects_length_mismatch():
    adv = build_advice(["11"], n=2, f=1)
    with pytest.raises(ValueError):
        membership_test("110", adv)


def test_completeness_and_soundness_fuzz():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(2, 17))
        f = int(rng.integers(1, 5))
        m = int(rng.integers(0, min(2 * f, 2 ** min(n, 8)) + 1))
        adv = build_advice(random_members(rng, n, m), n=n, f=f)
        bound = soundness_bound(adv)
        assert bound < Fraction(1, 4)
        if adv.members:
            y = adv.members[int(rng.integers(0, adv.m))]
            assert acceptance_probability(y, adv).acceptance_probability == 1
        x = "".join(rng.choice(["0", "1"], size=n))
        if x not in adv.members:
            p = acceptance_probability(x, adv).acceptance_probability
            assert p <= bound < Fraction(1, 4)


def test_sampled_decisions_match_exact_probability():
    # empirical frequency within 3 sigma of the exact value, 1e5 seeded draws
    rng = np.random.default_rng(99)
    instances = []
    for i in range(10):
        n = int(rng.integers(3, 10))
        f = int(rng.integers(1, 4))
        adv = build_advice(random_members(rng, n, 2 * f), n=n, f=f)
        x = "".join(rng.choice(["0", "1"], size=n))
        instances.append((x, adv))
    trials = 100_000
    for x, adv in instances:
        p = acceptance_probability(x, adv).acceptance_probability
        draws = sample_decision(p, np.random.default_rng(hash((x, adv.field.q)) % 2**32),
                                size=trials)
        freq = float(np.mean(draws))
        sigma = math.sqrt(float(p) * (1 - float(p)) / trials)
        assert abs(freq - float(p)) <= 3 * sigma + 1e-12


def test_advice_length_bound_and_growth():
    # qubits <= (m+1) + m*2*ceil(log2 q), and O(f log n) with the recorded c
    for n in (4, 8, 16, 32, 64):
        for f in (1, 2, 3, 4):
            rng = np.random.default_rng(n * 10 + f)
            adv = build_advice(random_members(rng, n, 2 * f), n=n, f=f)
            per = 2 * math.ceil(math.log2(adv.field.q))
            assert adv.advice_qubits == (adv.m + 1) + adv.m * per
            c = ADVICE_LENGTH_CONSTANT
            assert adv.advice_qubits <= c * f * math.log2(n) + c


def test_membership_probability_on_exact_states_matches_rational():
    rng = np.random.default_rng(17)
    adv = build_advice(random_members(rng, 3, 4), n=3, f=2)
    states = [fp.state for fp in adv.fingerprints]
    for _ in range(8):
        x = "".join(rng.choice(["0", "1"], size=3))
        exact = float(acceptance_probability(x, adv).acceptance_probability)
        born = membership_probability_on_states(x, adv, states)
        assert abs(born - exact) < 1e-10


def test_advice_json_round_trip():
    rng = np.random.default_rng(23)
    adv = build_advice(random_members(rng, 8, 3), n=8, f=2)
    text = advice_to_json(adv)
    back = advice_from_json(text)
    assert back == adv
    assert "members" in text and "amplitudes" not in text
