"""Exact arithmetic in GF(q) for prime q, prime selection, and the
fingerprint-polynomial machinery (evaluation and agreement counting).

All operations are pure functions on immutable values.  Agreement counting
enumerates the whole field, so every probability built on top of it is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Deterministic Miller-Rabin witnesses, valid for all n < 3.3e24 (covers 2**64).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Largest modulus for which the int64 vectorized Horner path cannot overflow:
# (q-1)*(q-1) + (q-1) < 2**63.
_VECTOR_Q_LIMIT = 2**31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (valid below 2**64)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def least_prime_above(m: int) -> int:
    """Least prime q with q > m.  Bertrand's postulate gives q <= 2m for m >= 1."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    q = m + 1
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class PrimeField:
    """The field GF(q) for a prime modulus q."""

    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self)

    def elements(self):
        """Iterate over all field elements in value order."""
        return (FieldElement(v, self) for v in range(self.q))


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(q), canonically represented in [0, q)."""

    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"value {self.value} outside [0, {self.field.q})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value + other.value) % self.field.q, self.field)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value - other.value) % self.field.q, self.field)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value * other.value % self.field.q, self.field)

    def _check(self, other: "FieldElement") -> None:
        if other.field.q != self.field.q:
            raise ValueError("elements from different fields")


def _validate_bits(x: str) -> None:
    if not x or any(c not in "01" for c in x):
        raise ValueError(f"expected a nonempty bit string, got {x!r}")


def poly_eval(x: str, z: FieldElement) -> FieldElement:
    """Evaluate p_x(z) = sum_i x_i z^(i-1) over GF(q) by Horner's rule.

    The first character of x is the constant coefficient.
    """
    _validate_bits(x)
    q = z.field.q
    acc = 0
    for c in reversed(x):
        acc = (acc * z.value + (c == "1")) % q
    return FieldElement(acc, z.field)


def _poly_eval_all(x: str, q: int) -> np.ndarray:
    """p_x(z) for every z in GF(q) at once (int64 Horner; q < 2**31)."""
    z = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c in reversed(x):
        acc = (acc * z + (c == "1")) % q
    return acc


def agreement_count(x: str, y: str, field: PrimeField) -> int:
    """Number of z in GF(q) with p_x(z) = p_y(z), by full enumeration.

    For distinct x, y of length n the degree bound caps this at n-1;
    for x = y every z agrees, so the count is q.
    """
    _validate_bits(x)
    _validate_bits(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if field.q < len(x):
        raise ValueError(f"field size {field.q} smaller than string length {len(x)}")
    if x == y:
        return field.q
    if field.q < _VECTOR_Q_LIMIT:
        return int(np.count_nonzero(_poly_eval_all(x, field.q) == _poly_eval_all(y, field.q)))
    return sum(
        poly_eval(x, FieldElement(z, field)).value == poly_eval(y, FieldElement(z, field)).value
        for z in range(field.q)
    )
