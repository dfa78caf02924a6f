"""Quantum fingerprints of bit strings, the sparse-set advice object, and the
membership test with exactly computed acceptance probabilities.

A fingerprint of x is the uniform superposition over pairs |z>|p_x(z)> for z
ranging over GF(q), where p_x is the polynomial with coefficient vector x.
Two distinct strings of length n share at most n-1 evaluation points, so a
measured pair almost never matches a foreign polynomial once q is large
enough.  The advice for a member set {y_1..y_m} is the marker |0^m 1> tensored
with the members' fingerprints; the membership test accepts as soon as one
fingerprint's measured (z, value) pair is consistent with the query string.

All acceptance probabilities are exact rationals; sampling is a veneer on top.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .core import Qustring
from .fields import PrimeField, agreement_count, least_prime_above, poly_eval

# Fixed implementation constant for the advice-length invariant
# qubits(advice) <= ADVICE_LENGTH_CONSTANT * (f * log2(n) + 1); asserted over
# the families exercised by the test suite.
ADVICE_LENGTH_CONSTANT = 16


def _ceil_div_frac(n: int, eps: Fraction) -> int:
    """ceil(n / eps) for exact rational eps."""
    return -((-n * eps.denominator) // eps.numerator)


@dataclass(frozen=True)
class Fingerprint:
    """Uniform superposition over (z, p_x(z)) pairs for one source string.

    The amplitude vector is a pure function of (source, field), so it is
    materialized lazily; exact-probability paths never touch it.
    """

    source: str
    field: PrimeField

    @property
    def source_length(self) -> int:
        return len(self.source)

    @property
    def register_width(self) -> int:
        """Qubits per register; the state has twice this many."""
        return (self.field.q - 1).bit_length()

    @property
    def support(self) -> tuple[int, ...]:
        """Basis indices (z << width) | p_x(z) carrying equal amplitude 1/sqrt(q)."""
        width = self.register_width
        return tuple(
            (z << width) | poly_eval(self.source, self.field.element(z)).value
            for z in range(self.field.q)
        )

    @cached_property
    def state(self) -> Qustring:
        return Qustring.uniform(2 * self.register_width, self.support)


def make_fingerprint(x: str, epsilon: Fraction | int | str | float) -> Fingerprint:
    """Fingerprint of x over GF(q) with q the least prime above ceil(|x|/eps)."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not x:
        raise ValueError("x must be nonempty")
    q = least_prime_above(_ceil_div_frac(len(x), eps))
    return Fingerprint(x, PrimeField(q))


@dataclass(frozen=True)
class FingerprintAdvice:
    """Marker |0^m 1> plus one fingerprint per member of the sparse set."""

    n: int
    f: int
    members: tuple[str, ...]
    field: PrimeField
    fingerprints: tuple[Fingerprint, ...]

    def __post_init__(self):
        m = len(self.members)
        if m > 2 * self.f:
            raise ValueError(f"{m} members exceed the 2f = {2 * self.f} budget")
        if len(set(self.members)) != m:
            raise ValueError("duplicate members")
        for y in self.members:
            if len(y) != self.n or any(c not in "01" for c in y):
                raise ValueError(f"member {y!r} is not a length-{self.n} bit string")
        if self.field.q < 8 * self.n * self.f:
            raise ValueError(
                f"field size {self.field.q} below the 8*n*f = {8 * self.n * self.f} floor"
            )

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def marker(self) -> Qustring:
        """The |0^m 1> prefix encoding the member count in unary."""
        return Qustring.basis(self.m + 1, 1)

    @property
    def advice_qubits(self) -> int:
        """(m+1) marker qubits plus 2*ceil(log2 q) per fingerprint."""
        per = 2 * (self.field.q - 1).bit_length()
        return (self.m + 1) + self.m * per


def build_advice(members: Sequence[str], n: int, f: int) -> FingerprintAdvice:
    """Advice over GF(q), q = least_prime_above(4 * k) with k = 2*f*n, so q > 8nf."""
    if f < 1 or n < 1:
        raise ValueError("n and f must be >= 1")
    members = tuple(sorted(members))
    k = 2 * f * n
    field = PrimeField(least_prime_above(4 * k))
    prints = tuple(Fingerprint(y, field) for y in members)
    return FingerprintAdvice(n=n, f=f, members=members, field=field, fingerprints=prints)


@dataclass(frozen=True)
class MembershipResult:
    decision: bool
    acceptance_probability: Fraction
    agreements: tuple[int, ...]


def acceptance_probability(x: str, advice: FingerprintAdvice) -> MembershipResult:
    """Exact acceptance probability 1 - prod_i (1 - a_i/q) without sampling."""
    if len(x) != advice.n:
        raise ValueError(f"query length {len(x)} != advice length {advice.n}")
    q = advice.field.q
    agreements = tuple(agreement_count(x, y, advice.field) for y in advice.members)
    miss = Fraction(1)
    for a in agreements:
        miss *= Fraction(q - a, q)
    prob = 1 - miss
    return MembershipResult(decision=prob == 1, acceptance_probability=prob,
                            agreements=agreements)


def sample_decision(probability: Fraction, rng: np.random.Generator,
                    size: Optional[int] = None):
    """Draw accept/reject decisions with the given exact probability."""
    p = float(probability)
    if size is None:
        return bool(rng.random() < p)
    return rng.random(size) < p


def membership_test(x: str, advice: FingerprintAdvice,
                    seed: Optional[int] = None,
                    rng: Optional[np.random.Generator] = None) -> MembershipResult:
    """Run the membership algorithm: exact probability plus one sampled decision.

    Measuring the first half of fingerprint i yields a uniform z; the test
    accepts when the second half equals p_x(z) for some i.  Members are
    accepted with probability exactly 1; non-members with probability at most
    m*(n-1)/q < 1/4.
    """
    exact = acceptance_probability(x, advice)
    if exact.acceptance_probability == 1:
        decision = True
    elif exact.acceptance_probability == 0:
        decision = False
    else:
        if rng is None:
            rng = np.random.default_rng(seed)
        decision = sample_decision(exact.acceptance_probability, rng)
    return MembershipResult(decision=decision,
                            acceptance_probability=exact.acceptance_probability,
                            agreements=exact.agreements)


def soundness_bound(advice: FingerprintAdvice) -> Fraction:
    """m*(n-1)/q, the exact upper bound on any non-member's acceptance."""
    return Fraction(advice.m * (advice.n - 1), advice.field.q)


def membership_probability_on_states(
    x: str, advice: FingerprintAdvice, states: Sequence[Qustring]
) -> float:
    """Born-rule acceptance probability when the fingerprints are supplied as
    explicit state vectors (possibly synthesized approximations).

    For each supplied state, the per-fingerprint match probability is the
    squared mass on the basis pairs (z, p_x(z)); the combined result is
    1 - prod_i (1 - P_i), matching the exact formula on exact states.
    """
    if len(x) != advice.n:
        raise ValueError(f"query length {len(x)} != advice length {advice.n}")
    if len(states) != advice.m:
        raise ValueError(f"expected {advice.m} states, got {len(states)}")
    q = advice.field.q
    width = (q - 1).bit_length()
    miss = 1.0
    for st in states:
        if st.n != 2 * width:
            raise ValueError(f"state has {st.n} qubits, fingerprints use {2 * width}")
        match_indices = [
            (z << width) | poly_eval(x, advice.field.element(z)).value for z in range(q)
        ]
        p_match = float(np.sum(np.abs(st.amplitudes[match_indices]) ** 2))
        miss *= 1.0 - p_match
    return 1.0 - miss


# --- serialization ------------------------------------------------------------
# Fingerprint states are deterministic functions of (n, f, members), so the
# JSON form stores members as hex strings and never dumps amplitudes.


def advice_to_json(advice: FingerprintAdvice) -> str:
    hex_width = (advice.n + 3) // 4
    return json.dumps(
        {
            "n": advice.n,
            "f": advice.f,
            "q": advice.field.q,
            "members": [format(int(y, 2), f"0{hex_width}x") for y in advice.members],
        },
        sort_keys=True,
    )


def advice_from_json(text: str) -> FingerprintAdvice:
    obj = json.loads(text)
    n = int(obj["n"])
    members = [format(int(h, 16), f"0{n}b") for h in obj["members"]]
    advice = build_advice(members, n=n, f=int(obj["f"]))
    if advice.field.q != int(obj["q"]):
        raise ValueError(
            f"stored field size {obj['q']} does not match rebuilt {advice.field.q}"
        )
    return advice
