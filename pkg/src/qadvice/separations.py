"""Executable counting arguments: sparse sets outnumber advice-realizable
sets, so a small set escaping every advised classifier always exists at the
right scale; plus exact majority-vote amplification.

Classifiers are finite probability tables, the desk-scale stand-in for
machines taking an advice string: table[x, s] is the acceptance probability
of input x under advice s, and a set A is "realized" by advice s when
A = {x : table[x, s] >= 2/3}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

ACCEPT_THRESHOLD = 2.0 / 3.0
_SCALE_LIMIT = 2**24


@dataclass(frozen=True)
class AdvisedClassifier:
    """Acceptance-probability table over (input, advice-string) pairs."""

    id: int
    n: int
    advice_len: int
    table: np.ndarray  # shape [2^n, 2^advice_len], entries in [0, 1]

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2**self.n, 2**self.advice_len):
            raise ValueError(
                f"table shape {t.shape} != {(2**self.n, 2**self.advice_len)}"
            )
        if np.any(t < 0) or np.any(t > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        if not isinstance(other, AdvisedClassifier):
            return NotImplemented
        return (self.id, self.n, self.advice_len) == (other.id, other.n, other.advice_len) \
            and np.array_equal(self.table, other.table)

    __hash__ = None

    def to_json_dict(self) -> dict:
        return {"id": self.id, "n": self.n, "advice_len": self.advice_len,
                "table": self.table.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "AdvisedClassifier":
        return cls(id=int(obj["id"]), n=int(obj["n"]),
                   advice_len=int(obj["advice_len"]),
                   table=np.array(obj["table"], dtype=float))


def classifiers_from_json(text: str) -> list[AdvisedClassifier]:
    return [AdvisedClassifier.from_json_dict(o) for o in json.loads(text)]


def classifiers_to_json(classifiers: Sequence[AdvisedClassifier]) -> str:
    return json.dumps([c.to_json_dict() for c in classifiers])


def random_classifier(n: int, advice_len: int, rng: np.random.Generator,
                      id: int = 0) -> AdvisedClassifier:
    table = rng.random((2**n, 2**advice_len))
    return AdvisedClassifier(id=id, n=n, advice_len=advice_len, table=table)


@dataclass(frozen=True)
class RealizedSetFamily:
    """All subsets of {0,1}^n that some advice string realizes at threshold 2/3."""

    classifier_id: int
    n: int
    sets: frozenset[frozenset[str]]


def realized_sets(c: AdvisedClassifier) -> RealizedSetFamily:
    """Enumerate {x : table[x, s] >= 2/3} over every advice string s, deduplicated."""
    if 2**c.n * 2**c.advice_len > _SCALE_LIMIT:
        raise ValueError("classifier exceeds the 2^24 enumeration budget")
    labels = [format(i, f"0{c.n}b") for i in range(2**c.n)]
    accept = c.table >= ACCEPT_THRESHOLD
    family = {
        frozenset(labels[i] for i in np.flatnonzero(accept[:, s]))
        for s in range(2**c.advice_len)
    }
    return RealizedSetFamily(classifier_id=c.id, n=c.n, sets=frozenset(family))


@dataclass(frozen=True)
class CountingRecord:
    n: int
    f: int
    lhs: int          # number of subsets of {0,1}^n with at most 2f elements
    middle: Fraction  # (2^n / 2f)^(2f), the paper-style intermediate bound
    rhs: int          # 2^(f n), the number of advice-realizable sets
    holds: bool
    sufficient_condition: bool  # n > 2 + 2 log2 f makes middle > rhs


def counting_inequality(n: int, f: int) -> CountingRecord:
    """Exact big-integer comparison sum_{j<=2f} C(2^n, j) > 2^(f n)."""
    if f < 1 or n < 1 or 2 * f > 2**n:
        raise ValueError(f"need 1 <= 2f <= 2^n, got n={n}, f={f}")
    lhs = sum(math.comb(2**n, j) for j in range(2 * f + 1))
    rhs = 2 ** (f * n)
    middle = Fraction(2**n, 2 * f) ** (2 * f)
    sufficient = n > 2 + 2 * math.log2(f)
    return CountingRecord(n=n, f=f, lhs=lhs, middle=middle, rhs=rhs,
                          holds=lhs > rhs, sufficient_condition=sufficient)


def _candidate_sets(n: int, max_size: int):
    """Subsets of {0,1}^n of size <= max_size, smallest first, lexicographic
    on the sorted member tuple within each size."""
    labels = [format(i, f"0{n}b") for i in range(2**n)]
    for size in range(max_size + 1):
        for combo in combinations(labels, size):
            yield frozenset(combo)


def diagonal_sparse_set(
    classifiers: Sequence[AdvisedClassifier], n: int, f: int
) -> Optional[frozenset[str]]:
    """First subset of {0,1}^n with at most 2f elements outside every
    classifier's realized family, or None when everything is realized.

    None is only possible when the pigeonhole premise fails, i.e. the
    candidate count does not exceed the combined family sizes.
    """
    for c in classifiers:
        if c.n != n:
            raise ValueError(f"classifier {c.id} has n={c.n}, expected {n}")
    realized: set[frozenset[str]] = set()
    for c in classifiers:
        realized |= realized_sets(c).sets
    for cand in _candidate_sets(n, 2 * f):
        if cand not in realized:
            return cand
    return None


def verify_escaping_set(
    classifiers: Sequence[AdvisedClassifier], candidate: frozenset[str]
) -> bool:
    """Independent second pass: re-derive every realized set from the raw
    tables and confirm none equals the candidate."""
    for c in classifiers:
        labels = [format(i, f"0{c.n}b") for i in range(2**c.n)]
        for s in range(2**c.advice_len):
            realized = frozenset(
                labels[i] for i in range(2**c.n) if c.table[i, s] >= ACCEPT_THRESHOLD
            )
            if realized == candidate:
                return False
    return True


Prob = Union[Fraction, float, int]


def majority_amplify(p: Prob, t: int) -> Prob:
    """Probability that more than t/2 of t independent p-trials succeed.

    Exact rational when p is given exactly (int or Fraction), float otherwise.
    """
    if isinstance(p, float):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p outside [0, 1]: {p}")
        exact = False
    else:
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise ValueError(f"p outside [0, 1]: {p}")
        exact = True
    if t < 1 or t % 2 == 0:
        raise ValueError(f"t must be odd and >= 1, got {t}")
    total = Fraction(0) if exact else 0.0
    for j in range(t // 2 + 1, t + 1):
        total += math.comb(t, j) * p**j * (1 - p) ** (t - j)
    return total


def advice_copies_for(epsilon: Prob, base_p: Prob = Fraction(2, 3)) -> int:
    """Minimal odd t with majority_amplify(base_p, t) >= 1 - epsilon.

    This is the number of tensored advice copies needed: quantum advice
    cannot be cloned, so each vote consumes a fresh copy.
    """
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(epsilon)
    if not 0 < eps < Fraction(1, 3):
        raise ValueError(f"epsilon must be in (0, 1/3), got {epsilon}")
    base = Fraction(base_p)
    if not Fraction(1, 2) < base <= 1:
        raise ValueError(f"base_p must exceed 1/2, got {base_p}")
    target = 1 - eps
    t = 1
    while majority_amplify(base, t) < target:
        t += 2
    return t
