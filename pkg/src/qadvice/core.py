"""Dense state-vector simulation over the fixed universal gate set, plus the
bit-exact binary circuit codec and the norms used throughout the suite.

Conventions:
  - qubit 0 is the most significant bit of a basis index, so the basis label
    of index i on n qubits is format(i, f"0{n}b") read left to right;
  - circuits list gates in application order (gates[0] acts first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES

_SQ2 = 1.0 / math.sqrt(2.0)

# Universal set: CNOT plus single-qubit gates generating a dense subgroup of
# SU(2), closed under inverses (TDG/SDG are the inverses of T/S).
GATE_MATRICES: dict[str, np.ndarray] = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "TDG": np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
}
TWO_QUBIT_KINDS = ("CNOT",)
GATE_KINDS = tuple(GATE_MATRICES) + TWO_QUBIT_KINDS

INVERSE_KIND = {"H": "H", "T": "TDG", "TDG": "T", "S": "SDG", "SDG": "S",
                "X": "X", "CNOT": "CNOT"}

# Binary codec: 3-byte header (magic, version, width), then one fixed-width
# 3-byte record per gate (opcode, index, index; second index 0 for 1q gates).
_CODEC_MAGIC = 0x51
_CODEC_VERSION = 0x01
_OPCODES = {"H": 0x01, "T": 0x02, "TDG": 0x03, "S": 0x04, "SDG": 0x05,
            "X": 0x06, "CNOT": 0x07}
_KIND_OF_OPCODE = {v: k for k, v in _OPCODES.items()}


class CodecError(ValueError):
    """Raised when circuit bytes or circuit text are malformed."""


class Qustring:
    """A unit-norm pure state of n qubits.

    ``uniform_support``, when set, tags the state as exactly the uniform
    superposition (amplitude 1/sqrt(len(support))) over the given basis
    indices; exact rational probabilities can then be derived without
    trusting the float backing.
    """

    __slots__ = ("n", "amplitudes", "uniform_support")

    def __init__(self, amplitudes: Sequence[complex] | np.ndarray,
                 uniform_support: Optional[tuple[int, ...]] = None):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0 or amps.size & (amps.size - 1):
            raise ValueError(f"amplitude count {amps.size} is not a power of two")
        n = amps.size.bit_length() - 1
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > DEFAULT_TOLERANCES.state_norm_atol:
            raise ValueError(f"state not normalized: sum |a|^2 = {norm2!r}")
        if uniform_support is not None:
            uniform_support = tuple(sorted(uniform_support))
            expect = np.zeros(amps.size, dtype=complex)
            expect[list(uniform_support)] = 1.0 / math.sqrt(len(uniform_support))
            if not np.allclose(amps, expect, atol=1e-12):
                raise ValueError("uniform_support tag does not match amplitudes")
        amps.setflags(write=False)
        self.n = n
        self.amplitudes = amps
        self.uniform_support = uniform_support

    @classmethod
    def basis(cls, n: int, index: int) -> "Qustring":
        if not 0 <= index < 2**n:
            raise ValueError(f"basis index {index} out of range for {n} qubits")
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(amps, uniform_support=(index,))

    @classmethod
    def from_bits(cls, bits: str) -> "Qustring":
        return cls.basis(len(bits), int(bits, 2))

    @classmethod
    def uniform(cls, n: int, support: Iterable[int]) -> "Qustring":
        support = tuple(sorted(support))
        amps = np.zeros(2**n, dtype=complex)
        amps[list(support)] = 1.0 / math.sqrt(len(support))
        return cls(amps, uniform_support=support)

    def __repr__(self):
        return f"Qustring(n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, Qustring):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


@dataclass(frozen=True)
class Gate:
    """One gate application: kind plus one target (two for CNOT: control, target)."""

    kind: str
    targets: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == "CNOT" else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} takes {want} qubit index(es), got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated qubit index in {self.targets}")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence on a fixed number of qubits."""

    width: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.width:
                raise ValueError(f"gate {g} exceeds width {self.width}")

    @property
    def size(self) -> int:
        return len(self.gates)

    def inverse(self) -> "Circuit":
        inv = tuple(Gate(INVERSE_KIND[g.kind], g.targets) for g in reversed(self.gates))
        return Circuit(self.width, inv)


def _apply_1q(vec: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a dense state vector."""
    t = vec.reshape([2] * n)
    t = np.moveaxis(t, qubit, -1)
    t = t @ mat.T
    return np.moveaxis(t, -1, qubit).reshape(-1)


def _apply_cnot(vec: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    t = vec.reshape([2] * n).copy()
    idx1 = [slice(None)] * n
    idx1[control] = 1
    sub = t[tuple(idx1)]
    t[tuple(idx1)] = np.flip(sub, axis=target if target < control else target - 1)
    return t.reshape(-1)


def apply(circuit: Circuit, state: Qustring) -> Qustring:
    """Return U(C)|state>; unitary, so the norm is preserved."""
    if state.n != circuit.width:
        raise ValueError(f"state has {state.n} qubits, circuit width is {circuit.width}")
    vec = np.array(state.amplitudes, dtype=complex)
    for g in circuit.gates:
        if g.kind == "CNOT":
            vec = _apply_cnot(vec, g.targets[0], g.targets[1], circuit.width)
        else:
            vec = _apply_1q(vec, GATE_MATRICES[g.kind], g.targets[0], circuit.width)
    drift = abs(float(np.sum(np.abs(vec) ** 2)) - 1.0)
    if drift > DEFAULT_TOLERANCES.apply_norm_atol:
        raise RuntimeError(f"norm drifted by {drift}")
    return Qustring(vec)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit (columns via basis-state simulation)."""
    if circuit.width > 12:
        raise ValueError("unitary_of supports at most 12 qubits")
    dim = 2**circuit.width
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        vec = np.zeros(dim, dtype=complex)
        vec[j] = 1.0
        for g in circuit.gates:
            if g.kind == "CNOT":
                vec = _apply_cnot(vec, g.targets[0], g.targets[1], circuit.width)
            else:
                vec = _apply_1q(vec, GATE_MATRICES[g.kind], g.targets[0], circuit.width)
        out[:, j] = vec
    return out


def measure_probs(state: Qustring, qubits: Iterable[int]) -> dict[str, float]:
    """Marginal Born-rule outcome probabilities for the given qubits.

    Keys are bit strings over the selected qubits in ascending index order.
    """
    qs = sorted(set(qubits))
    if not qs:
        raise ValueError("empty qubit index set")
    if qs[0] < 0 or qs[-1] >= state.n:
        raise ValueError(f"qubit indices {qs} out of range for n={state.n}")
    probs = np.abs(state.amplitudes.reshape([2] * state.n)) ** 2
    other = tuple(i for i in range(state.n) if i not in qs)
    marg = probs.sum(axis=other) if other else probs
    marg = marg.reshape(-1)
    total = float(marg.sum())
    if abs(total - 1.0) > DEFAULT_TOLERANCES.probs_sum_atol:
        raise RuntimeError(f"marginal probabilities sum to {total}")
    w = len(qs)
    return {format(i, f"0{w}b"): float(p) for i, p in enumerate(marg)}


def l2_distance(a: Qustring, b: Qustring) -> float:
    """Euclidean norm of the amplitude difference."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def l2_distance_up_to_phase(a: Qustring, b: Qustring) -> float:
    """min over global phases of ||a - e^{i phi} b||.

    The optimal phase is the argument of <a|b>; the difference is formed
    explicitly so near-zero distances keep full float precision.
    """
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    inner = complex(np.vdot(a.amplitudes, b.amplitudes))
    phase = inner.conjugate() / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a.amplitudes - phase * b.amplitudes))


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value via power iteration on A+A (deterministic start).

    Relative accuracy around 1e-8; unit tests cross-check against a dense
    SVD oracle, which this routine deliberately does not call.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return 0.0
    gram = a.conj().T @ a
    # Dense deterministic start; the index-dependent ramp avoids starting
    # orthogonal to the dominant eigenvector for structured matrices.
    v = (1.0 + np.arange(dim) / dim).astype(complex)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(100_000):
        w = gram @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # start vector hit the kernel; restart from the heaviest column
            j = int(np.argmax(np.linalg.norm(gram, axis=0)))
            w = gram[:, j]
            nw = float(np.linalg.norm(w))
        v = w / nw
        new_lam = float(np.real(np.vdot(v, gram @ v)))
        if abs(new_lam - lam) <= 1e-13 * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
    return math.sqrt(max(lam, 0.0))


# --- binary codec -----------------------------------------------------------

def encode_circuit(circuit: Circuit) -> bytes:
    """Code(C): fixed-width binary encoding; len(bytes) >= size(C) always."""
    if circuit.width > 255:
        raise CodecError(f"width {circuit.width} exceeds the 1-byte codec limit")
    out = bytearray((_CODEC_MAGIC, _CODEC_VERSION, circuit.width))
    for g in circuit.gates:
        if max(g.targets) > 255:
            raise CodecError(f"qubit index in {g} exceeds the 1-byte codec limit")
        a = g.targets[0]
        b = g.targets[1] if g.kind == "CNOT" else 0
        out += bytes((_OPCODES[g.kind], a, b))
    return bytes(out)


def decode_circuit(code: bytes) -> Circuit:
    """Inverse of encode_circuit; rejects any malformed byte sequence."""
    if len(code) < 3:
        raise CodecError("truncated header")
    if code[0] != _CODEC_MAGIC:
        raise CodecError(f"bad magic byte 0x{code[0]:02x}")
    if code[1] != _CODEC_VERSION:
        raise CodecError(f"unsupported codec version {code[1]}")
    width = code[2]
    if width < 1:
        raise CodecError("width byte must be >= 1")
    body = code[3:]
    if len(body) % 3:
        raise CodecError("truncated gate record")
    gates = []
    for off in range(0, len(body), 3):
        op, a, b = body[off], body[off + 1], body[off + 2]
        kind = _KIND_OF_OPCODE.get(op)
        if kind is None:
            raise CodecError(f"unknown opcode 0x{op:02x}")
        if kind == "CNOT":
            targets = (a, b)
        else:
            if b != 0:
                raise CodecError(f"nonzero pad byte {b} in 1-qubit record")
            targets = (a,)
        if max(targets) >= width:
            raise CodecError(f"qubit index {max(targets)} >= width {width}")
        try:
            gates.append(Gate(kind, targets))
        except ValueError as e:
            raise CodecError(str(e)) from None
    return Circuit(width, tuple(gates))


# --- text format -------------------------------------------------------------

def circuit_to_text(circuit: Circuit) -> str:
    """One gate per line, `width <n>` first: `H 0`, `CNOT 0 1`, `T 2`."""
    lines = [f"width {circuit.width}"]
    lines += [" ".join((g.kind, *map(str, g.targets))) for g in circuit.gates]
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("width "):
        raise CodecError("first line must be `width <n>`")
    try:
        width = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise CodecError(f"bad width line {lines[0]!r}") from None
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        kind, idx = parts[0].upper(), parts[1:]
        if kind not in GATE_KINDS:
            raise CodecError(f"unknown gate {parts[0]!r}")
        try:
            gates.append(Gate(kind, tuple(int(i) for i in idx)))
        except ValueError as e:
            raise CodecError(str(e)) from None
    try:
        return Circuit(width, tuple(gates))
    except ValueError as e:
        raise CodecError(str(e)) from None
