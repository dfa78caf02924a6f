"""Base net of single-qubit gate words used by the recursive synthesizer.

Each word over {H, T, TDG, S, SDG, X} is stored as a unit quaternion
(a, b, c, d) standing for the SU(2) representative a*I - i(b*X + c*Y + d*Z).
Two facts make this representation ideal here:

  - quaternion multiplication is matrix multiplication, and
  - the operator norm of a difference of SU(2) matrices equals the Euclidean
    distance of their quaternions, so a kd-tree nearest-neighbour query
    returns exactly the closest word in the phase-quotiented operator norm
    (both quaternion signs are stored; q and -q are the same physical gate).

The net is deterministic, cached to a versioned binary file, and safe to
delete (it is rebuilt on demand).  Override the location with the
QADVICE_NET_CACHE environment variable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

NET_FORMAT_VERSION = 1
DEFAULT_DEPTH = 16  # maximum word length enumerated into the net

WORD_GATES = ("H", "T", "TDG", "S", "SDG", "X")
_INVERSE_INDEX = (0, 2, 1, 4, 3, 5)  # H, T<->TDG, S<->SDG, X

_C8, _S8 = math.cos(math.pi / 8), math.sin(math.pi / 8)
_R2 = 1.0 / math.sqrt(2.0)
# SU(2) representatives of the generators (determinant normalized away)
_GATE_QUATS = np.array(
    [
        [0.0, _R2, 0.0, _R2],   # H  -> -iH
        [_C8, 0.0, 0.0, _S8],   # T
        [_C8, 0.0, 0.0, -_S8],  # TDG
        [_R2, 0.0, 0.0, _R2],   # S
        [_R2, 0.0, 0.0, -_R2],  # SDG
        [0.0, 1.0, 0.0, 0.0],   # X  -> -iX
    ]
)


def quat_mult(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes: U(p) @ U(q)."""
    pa, pb, pc, pd = np.moveaxis(p, -1, 0)
    qa, qb, qc, qd = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pa * qa - pb * qb - pc * qc - pd * qd,
            pa * qb + pb * qa + pc * qd - pd * qc,
            pa * qc - pb * qd + pc * qa + pd * qb,
            pa * qd + pb * qc - pc * qb + pd * qa,
        ],
        axis=-1,
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    """Inverse of a unit quaternion."""
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def quat_from_unitary(u: np.ndarray) -> np.ndarray:
    """Unit quaternion of the SU(2) representative of a 2x2 unitary."""
    u = np.asarray(u, dtype=complex)
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    su = u / np.sqrt(det)
    a = (su[0, 0] + su[1, 1]).real / 2.0
    d = (su[1, 1] - su[0, 0]).imag / 2.0
    c = (su[1, 0] - su[0, 1]).real / 2.0
    b = -(su[0, 1] + su[1, 0]).imag / 2.0
    q = np.array([a, b, c, d])
    return q / np.linalg.norm(q)


def unitary_from_quat(q: np.ndarray) -> np.ndarray:
    a, b, c, d = q
    return np.array(
        [[a - 1j * d, -c - 1j * b], [c - 1j * b, a + 1j * d]], dtype=complex
    )


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Fix the sign ambiguity: first component of magnitude > 1e-9 positive."""
    q = np.asarray(q, dtype=float)
    flat = q.reshape(-1, 4)
    big = np.abs(flat) > 1e-9
    first = np.argmax(big, axis=1)
    signs = np.sign(flat[np.arange(len(flat)), first])
    return (flat * signs[:, None]).reshape(q.shape)


def phase_distance(p: np.ndarray, q: np.ndarray) -> float:
    """min over global phases of the operator norm ||U(p) - e^{i phi} U(q)||.

    For SU(2) this is min(|p - q|, |p + q|) in quaternion coordinates.
    """
    return float(min(np.linalg.norm(p - q), np.linalg.norm(p + q)))


@dataclass
class SKNet:
    """Deduplicated shortest words up to a fixed length, with a kd-tree."""

    depth: int
    quats: np.ndarray        # [N, 4] canonical-sign unit quaternions
    words: list[bytes]       # gate-index strings, words[i] realizes quats[i]
    eps0_estimate: float     # empirical covering radius (sampled)

    def __post_init__(self):
        signed = np.vstack([self.quats, -self.quats])
        self._tree = cKDTree(signed)
        self._n = len(self.quats)

    def query(self, q: np.ndarray) -> tuple[int, float]:
        """Index of the closest word and its phase-quotient distance."""
        dist, idx = self._tree.query(np.asarray(q, dtype=float))
        return int(idx % self._n), float(dist)

    def query_shortest(self, q: np.ndarray, slack: float = 1.3,
                       k: int = 64) -> tuple[int, float]:
        """Shortest word among the k nearest candidates within slack times the
        best distance.  Nearest-neighbour hits are dominated by maximum-length
        words (the outer BFS shell is the densest), so trading a little
        distance for a shorter word shrinks every synthesized circuit."""
        dists, idxs = self._tree.query(np.asarray(q, dtype=float), k=k)
        best = float(dists[0])
        cutoff = best * slack + 1e-12
        chosen, chosen_dist = int(idxs[0] % self._n), best
        chosen_len = len(self.words[chosen])
        for dist, idx in zip(dists[1:], idxs[1:]):
            if dist > cutoff:
                break
            i = int(idx % self._n)
            ln = len(self.words[i])
            if ln < chosen_len or (ln == chosen_len and i < chosen):
                chosen, chosen_dist, chosen_len = i, float(dist), ln
        return chosen, chosen_dist

    def word_quat(self, index: int) -> np.ndarray:
        return self.quats[index]

    def __len__(self):
        return self._n


def _build_words(depth: int) -> tuple[np.ndarray, list[bytes]]:
    """Breadth-first enumeration of distinct group elements by word length."""
    quats = [np.array([1.0, 0.0, 0.0, 0.0])]
    words: list[bytes] = [b""]
    seen = {quat_canonical(quats[0]).round(8).tobytes()}
    frontier = np.array(quats)
    frontier_words = [b""]
    for _ in range(depth):
        children = quat_canonical(
            np.concatenate([quat_mult(g, frontier) for g in _GATE_QUATS])
        )
        child_words = [
            bytes((gi,)) + w for gi in range(len(_GATE_QUATS)) for w in frontier_words
        ]
        keep_q, keep_w = [], []
        for row, w in zip(children.round(8), child_words):
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                keep_q.append(row)
                keep_w.append(w)
        if not keep_q:
            break
        frontier = np.array(keep_q)
        frontier_words = keep_w
        quats.extend(keep_q)
        words.extend(keep_w)
    # words store the leftmost-applied-last products; circuit order is reversed
    return np.array(quats), words


def _estimate_eps0(quats: np.ndarray, samples: int = 4096, seed: int = 0) -> float:
    """Empirical covering radius: worst nearest-neighbour distance over a
    Haar sample of SU(2) (quaternions uniform on the 3-sphere)."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(samples, 4))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    tree = cKDTree(np.vstack([quats, -quats]))
    dists, _ = tree.query(pts)
    return float(dists.max())


def _cache_path(depth: int) -> Path:
    env = os.environ.get("QADVICE_NET_CACHE")
    if env:
        return Path(env)
    return (
        Path.home()
        / ".cache"
        / "qadvice"
        / f"sk_net_v{NET_FORMAT_VERSION}_d{depth}.npz"
    )


def build_net(depth: int = DEFAULT_DEPTH) -> SKNet:
    quats, words = _build_words(depth)
    eps0 = _estimate_eps0(quats)
    return SKNet(depth=depth, quats=quats, words=words, eps0_estimate=eps0)


def save_net(net: SKNet, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lengths = np.array([len(w) for w in net.words], dtype=np.int64)
    blob = np.frombuffer(b"".join(net.words), dtype=np.uint8)
    np.savez_compressed(
        path,
        version=np.array([NET_FORMAT_VERSION]),
        depth=np.array([net.depth]),
        quats=net.quats,
        word_lengths=lengths,
        word_blob=blob,
        eps0=np.array([net.eps0_estimate]),
    )


def load_net(path: Path) -> Optional[SKNet]:
    try:
        data = np.load(path)
        if int(data["version"][0]) != NET_FORMAT_VERSION:
            return None
        blob = data["word_blob"].tobytes()
        words, off = [], 0
        for ln in data["word_lengths"]:
            words.append(blob[off : off + int(ln)])
            off += int(ln)
        return SKNet(
            depth=int(data["depth"][0]),
            quats=data["quats"],
            words=words,
            eps0_estimate=float(data["eps0"][0]),
        )
    except (OSError, KeyError, ValueError):
        return None


_DEFAULT_NET: Optional[SKNet] = None


def get_default_net(depth: int = DEFAULT_DEPTH) -> SKNet:
    """Process-wide net singleton, loaded from the cache file when present."""
    global _DEFAULT_NET
    if _DEFAULT_NET is not None and _DEFAULT_NET.depth == depth:
        return _DEFAULT_NET
    path = _cache_path(depth)
    net = load_net(path)
    if net is None or net.depth != depth:
        net = build_net(depth)
        try:
            save_net(net, path)
        except OSError:
            pass  # cache is best-effort
    _DEFAULT_NET = net
    return net
