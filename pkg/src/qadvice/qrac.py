"""Quantum random access codes: the entropy lower bound on carrier qubits,
the standard (2,1) and (3,1) single-qubit schemes, and a seeded numerical
search certifying that those schemes sit at the optimum.

Logarithms are base 2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2 (1-p), with H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def nayak_min_qubits(n: int, p: float) -> int:
    """Minimum carrier qubits ceil((1 - H(p)) * n) for an (n, m, p) code.

    The bound is vacuous at p <= 1/2, so such p are rejected.
    """
    if not 0.5 < p <= 1.0:
        raise ValueError(f"bound requires 1/2 < p <= 1, got {p}")
    return math.ceil((1.0 - binary_entropy(p)) * n)


def _bloch_state(x: float, y: float, z: float) -> np.ndarray:
    """Pure qubit state with the given (unit) Bloch vector."""
    norm = math.sqrt(x * x + y * y + z * z)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"Bloch vector not unit length: {norm}")
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array(
        [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex
    )


def _angles_state(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex
    )


_Z_BASIS = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
_X_BASIS = (
    np.array([1, 1], dtype=complex) / math.sqrt(2),
    np.array([1, -1], dtype=complex) / math.sqrt(2),
)
_Y_BASIS = (
    np.array([1, 1j], dtype=complex) / math.sqrt(2),
    np.array([1, -1j], dtype=complex) / math.sqrt(2),
)


@dataclass(frozen=True)
class RacScheme:
    """An (n, m, p) random access code: encoder plus one two-outcome
    projective measurement per encoded index.

    ``encoder`` maps every n-bit string to 2**m amplitudes; measurement i is
    an orthonormal basis pair (v0, v1), outcome j decoding bit value j.
    """

    n: int
    m: int
    encoder: Mapping[str, np.ndarray]
    measurements: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        if len(self.measurements) != self.n:
            raise ValueError(f"need {self.n} measurements, got {len(self.measurements)}")
        dim = 2**self.m
        for x in _all_bit_strings(self.n):
            if x not in self.encoder:
                raise ValueError(f"encoder undefined on {x!r}")
            v = np.asarray(self.encoder[x])
            if v.shape != (dim,) or abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise ValueError(f"encoder output for {x!r} is not a unit {dim}-vector")


def _all_bit_strings(n: int):
    return [format(i, f"0{n}b") for i in range(2**n)]


def _check_basis(v0: np.ndarray, v1: np.ndarray) -> None:
    atol = DEFAULT_TOLERANCES.basis_orthonormal_atol
    if (abs(np.linalg.norm(v0) - 1) > atol or abs(np.linalg.norm(v1) - 1) > atol
            or abs(np.vdot(v0, v1)) > atol):
        raise ValueError("measurement basis is not orthonormal")


def success_table(scheme: RacScheme) -> dict[tuple[str, int], float]:
    """Born probability of decoding bit i correctly from enc(x), per (x, i)."""
    for v0, v1 in scheme.measurements:
        _check_basis(np.asarray(v0), np.asarray(v1))
    table = {}
    for x in _all_bit_strings(scheme.n):
        state = np.asarray(scheme.encoder[x])
        for i in range(scheme.n):
            v = scheme.measurements[i][int(x[i])]
            table[(x, i)] = float(abs(np.vdot(v, state)) ** 2)
    return table


def scheme_success(scheme: RacScheme) -> float:
    """Worst-case decoding probability: min over all (x, i) pairs."""
    return min(success_table(scheme).values())


def rac21_scheme() -> RacScheme:
    """Encode b1 b2 on one qubit with Bloch vector ((-1)^b2, 0, (-1)^b1)/sqrt(2);
    Z decodes bit 1, X decodes bit 2.  Worst case 1/2 + 1/(2 sqrt 2)."""
    s = 1 / math.sqrt(2)
    enc = {
        x: _bloch_state((-1) ** int(x[1]) * s, 0.0, (-1) ** int(x[0]) * s)
        for x in _all_bit_strings(2)
    }
    return RacScheme(n=2, m=1, encoder=enc, measurements=(_Z_BASIS, _X_BASIS))


def rac31_scheme() -> RacScheme:
    """Encode b1 b2 b3 with Bloch vector ((-1)^b2, (-1)^b3, (-1)^b1)/sqrt(3);
    Z/X/Y decode bits 1/2/3.  Worst case 1/2 + 1/(2 sqrt 3)."""
    s = 1 / math.sqrt(3)
    enc = {
        x: _bloch_state(
            (-1) ** int(x[1]) * s, (-1) ** int(x[2]) * s, (-1) ** int(x[0]) * s
        )
        for x in _all_bit_strings(3)
    }
    return RacScheme(n=3, m=1, encoder=enc, measurements=(_Z_BASIS, _X_BASIS, _Y_BASIS))


@dataclass(frozen=True)
class RacSearchResult:
    best_p: float
    best_scheme: RacScheme
    start_index: int
    starts: int
    resolution: float


def _params_to_scheme(n: int, params: np.ndarray) -> RacScheme:
    # layout: 2 angles per codeword (2^n of them), then 2 per measurement
    enc = {}
    for i, x in enumerate(_all_bit_strings(n)):
        enc[x] = _angles_state(params[2 * i], params[2 * i + 1])
    meas = []
    off = 2 * 2**n
    for i in range(n):
        v0 = _angles_state(params[off + 2 * i], params[off + 2 * i + 1])
        v1 = np.array([-np.conj(v0[1]), np.conj(v0[0])], dtype=complex)
        meas.append((v0, v1))
    return RacScheme(n=n, m=1, encoder=enc, measurements=tuple(meas))


def _prob_grid(n: int, params: np.ndarray, coord: int, grid: np.ndarray) -> np.ndarray:
    """Correct-decoding probabilities for every candidate value of one coordinate.

    Returns an array [len(grid), 2^n * n] of Born probabilities; encoder
    states and measurement kets are rebuilt in bulk per grid row.
    """
    n_codes = 2**n
    g = grid.size
    thetas = np.tile(params[0::2], (g, 1))
    phis = np.tile(params[1::2], (g, 1))
    which = coord // 2
    if coord % 2 == 0:
        thetas[:, which] = grid
    else:
        phis[:, which] = grid
    # states for all codewords and measurement kets, per grid row
    kets = np.stack(
        [np.cos(thetas / 2), np.exp(1j * phis) * np.sin(thetas / 2)], axis=-1
    )  # [g, n_codes + n, 2]
    codes = kets[:, :n_codes, :]
    meas0 = kets[:, n_codes:, :]
    meas1 = np.stack(
        [-np.conj(meas0[..., 1]), np.conj(meas0[..., 0])], axis=-1
    )
    # prob[g, x, i] of the correct outcome
    bits = np.array([[int(b) for b in x] for x in _all_bit_strings(n)])  # [n_codes, n]
    probs = np.empty((g, n_codes, n))
    for i in range(n):
        v = np.where(bits[None, :, i, None] == 0, meas0[:, i, None, :], meas1[:, i, None, :])
        amp = np.conj(v[..., 0]) * codes[..., 0] + np.conj(v[..., 1]) * codes[..., 1]
        probs[:, :, i] = np.abs(amp) ** 2
    return probs.reshape(g, -1)


def _softmin(probs: np.ndarray, temperature: float) -> np.ndarray:
    """Smoothed minimum along the last axis; exact minimum at temperature 0.

    The softened surface lets single-coordinate moves make progress at
    equalizer points where the exact maximin is locally flat.
    """
    if temperature <= 0.0:
        return probs.min(axis=-1)
    lo = probs.min(axis=-1, keepdims=True)
    s = np.exp(-(probs - lo) / temperature).sum(axis=-1)
    return lo[..., 0] - temperature * np.log(s)


def rac_search(n: int, m: int = 1, resolution: float = math.pi / 180,
               seed: int = 0, starts: int = 64) -> RacSearchResult:
    """Coordinate-ascent maximin search over pure-state encoders and projective
    measurements on one qubit, from a seeded multi-start grid.

    The grid step starts at ``resolution`` and anneals down by 8x until below
    1e-5; deterministic for a fixed seed, ties broken by lowest start index.
    """
    if m != 1 or not 1 <= n <= 3:
        raise ValueError("search supports n <= 3 encoded bits on m = 1 qubit")
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    rng = np.random.default_rng(seed)
    n_params = 2 * 2**n + 2 * n
    # temperature anneals the softened objective down to the exact minimum
    # while the grid step shrinks from `resolution` to ~1e-5 radians
    phases = [(0.5, resolution, True), (0.15, resolution, False),
              (0.05, resolution, False), (0.015, resolution / 8, False)]
    step, temp = resolution / 8, 0.005
    while step > 1e-5:
        phases.append((temp, step, False))
        step /= 8.0
        temp = 0.0
    phases.append((0.0, max(step, 1.5e-6), False))
    best_p, best_params, best_start = -1.0, None, -1
    for start in range(starts):
        params = rng.uniform(0.0, 2 * math.pi, size=n_params)
        for temperature, step, full_range in phases:
            probs = _prob_grid(n, params, 0, np.array([params[0]]))
            current = float(_softmin(probs, temperature)[0])
            improved = True
            while improved:
                improved = False
                for coord in range(n_params):
                    if full_range:
                        grid = np.arange(0.0, 2 * math.pi, step)
                    else:
                        grid = params[coord] + np.arange(-16, 17) * step
                    vals = _softmin(_prob_grid(n, params, coord, grid), temperature)
                    j = int(np.argmax(vals))
                    if vals[j] > current + 1e-12:
                        params[coord] = grid[j]
                        current = float(vals[j])
                        improved = True
        final = float(_softmin(_prob_grid(n, params, 0, np.array([params[0]])), 0.0)[0])
        if final > best_p + 1e-12:
            best_p, best_params, best_start = final, params.copy(), start
    return RacSearchResult(
        best_p=best_p,
        best_scheme=_params_to_scheme(n, best_params),
        start_index=best_start,
        starts=starts,
        resolution=resolution,
    )
