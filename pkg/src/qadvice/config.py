"""Central tolerance table.

Every numeric tolerance used by the library lives here so that reports can
embed the exact thresholds in force.  All floats are IEEE doubles.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    # state vectors
    state_norm_atol: float = 1e-10        # |sum |a_i|^2 - 1| at construction
    apply_norm_atol: float = 1e-9         # norm drift allowed per circuit application
    probs_sum_atol: float = 1e-9          # marginal probabilities must sum to 1
    gate_unitarity_atol: float = 1e-12    # ||U+U - I|| for gate matrices

    # linear algebra
    operator_norm_rtol: float = 1e-8      # power-method relative accuracy
    basis_orthonormal_atol: float = 1e-9  # measurement basis validation

    # synthesis
    exact_hit_atol: float = 1e-12         # "the word is exact" threshold
    sk_precision_floor: float = 1e-6      # smallest supported epsilon for SK
    state_epsilon_floor: float = 1e-3     # smallest supported epsilon for state synthesis
    unitary_epsilon_floor: float = 1e-2   # smallest supported epsilon for unitary synthesis

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
