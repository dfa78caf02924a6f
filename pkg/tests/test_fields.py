import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qadvice.fields import (
    FieldElement,
    PrimeField,
    agreement_count,
    is_prime,
    least_prime_above,
    poly_eval,
)


def sieve_primes(limit):
    """Trial oracle: boolean primality table via the sieve of Eratosthenes."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def poly_eval_naive(x, z, q):
    """Independent oracle: literal sum of x_i * z^(i-1) mod q."""
    return sum(int(c) * pow(z, i, q) for i, c in enumerate(x)) % q


def test_least_prime_above_examples():
    assert least_prime_above(1) == 2
    assert least_prime_above(16) == 17  # sieve-checked below
    assert least_prime_above(24) == 29


def test_least_prime_above_rejects_zero():
    with pytest.raises(ValueError):
        least_prime_above(0)


def test_is_prime_vs_sieve():
    flags = sieve_primes(10_000)
    for n in range(10_001):
        assert is_prime(n) == flags[n], n


def test_bertrand_bound_exhaustive_to_1e6():
    # next-prime for every m <= 1e6 via the sieve (vectorized), bound q <= 2m
    limit = 2_000_010
    flags = sieve_primes(limit)
    primes = np.flatnonzero(flags)
    ms = np.arange(1, 1_000_001)
    nxt = primes[np.searchsorted(primes, ms, side="right")]
    assert np.all(nxt <= 2 * ms)
    # the library function agrees with the sieve oracle on a fuzz sample
    rng = np.random.default_rng(7)
    for m in np.concatenate(([1, 2, 3, 999_983, 1_000_000], rng.integers(1, 10**6, 300))):
        assert least_prime_above(int(m)) == int(nxt[m - 1])


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(15)


def test_field_element_range_checked():
    f = PrimeField(5)
    with pytest.raises(ValueError):
        FieldElement(5, f)
    with pytest.raises(ValueError):
        FieldElement(-1, f)


def test_poly_eval_examples():
    f5 = PrimeField(5)
    for z in range(5):
        assert poly_eval("0000", f5.element(z)).value == 0
    assert poly_eval("11", f5.element(3)).value == 4  # 1 + 3 mod 5
    assert poly_eval("10", f5.element(3)).value == 1  # constant polynomial


def test_poly_eval_vs_naive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(300):
        n = int(rng.integers(1, 17))
        q = least_prime_above(int(rng.integers(n, 4 * n + 2)))
        x = "".join(rng.choice(["0", "1"], size=n))
        z = int(rng.integers(0, q))
        got = poly_eval(x, PrimeField(q).element(z)).value
        assert got == poly_eval_naive(x, z, q)


def test_poly_eval_rejects_cross_field_use():
    f5, f7 = PrimeField(5), PrimeField(7)
    a, b = f5.element(2), f7.element(2)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a * b


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_poly_eval_linear_on_disjoint_supports(data):
    # x, y with disjoint supports: p_{x|y}(z) = p_x(z) + p_y(z) in GF(q)
    n = data.draw(st.integers(1, 16))
    mask = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    xbits = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    ybits = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    x = "".join("1" if m and b else "0" for m, b in zip(mask, xbits))
    y = "".join("1" if (not m) and b else "0" for m, b in zip(mask, ybits))
    merged = "".join("1" if a == "1" or b == "1" else "0" for a, b in zip(x, y))
    q = least_prime_above(n)
    f = PrimeField(q)
    z = f.element(data.draw(st.integers(0, q - 1)))
    assert poly_eval(merged, z) == poly_eval(x, z) + poly_eval(y, z)


def test_agreement_count_examples():
    assert agreement_count("10101100110011001", "10101100110011001", PrimeField(17)) == 17
    assert agreement_count("10", "01", PrimeField(5)) == 1  # p_x - p_y = 1 - z
    assert agreement_count("11", "10", PrimeField(17)) == 1  # difference is z


def test_agreement_count_vs_scalar_enumeration():
    # the vectorized path must agree with per-z scalar poly_eval
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 12))
        q = least_prime_above(int(rng.integers(n, 6 * n + 2)))
        f = PrimeField(q)
        x = "".join(rng.choice(["0", "1"], size=n))
        y = "".join(rng.choice(["0", "1"], size=n))
        direct = sum(
            poly_eval(x, f.element(z)).value == poly_eval(y, f.element(z)).value
            for z in range(q)
        )
        assert agreement_count(x, y, f) == direct


def test_agreement_count_length_mismatch():
    with pytest.raises(ValueError):
        agreement_count("10", "100", PrimeField(5))


def test_agreement_degree_bound_fuzz():
    # distinct x != y of length n agree on at most n-1 field elements
    rng = np.random.default_rng(1234)
    for _ in range(10_000):
        n = int(rng.integers(2, 17))
        q = least_prime_above(int(rng.integers(n, 8 * n)))
        f = PrimeField(q)
        x = "".join(rng.choice(["0", "1"], size=n))
        y = "".join(rng.choice(["0", "1"], size=n))
        if x == y:
            assert agreement_count(x, y, f) == q
        else:
            assert agreement_count(x, y, f) <= n - 1
