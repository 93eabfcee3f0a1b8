"""Ideal statevector and noisy density-matrix simulation with seeded shot sampling.

Conventions:
  - Qubit k is the bit of weight 2^k in a basis-state index (qubit 0 least
    significant).
  - Distribution bitstrings are MSB-first over the measured qubits in their
    declared order, so the first measured qubit is the leftmost character.

Noise is a per-gate depolarizing channel in Pauli-twirl form plus a per-qubit
readout confusion matrix applied to the final measured marginal.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuits import Circuit, Gate, GateKind

MAX_DENSITY_QUBITS = 10

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def gate_unitary(g: Gate) -> np.ndarray:
    """2x2 or 4x4 matrix; two-qubit basis is |q_first q_second> with q_first the high bit."""
    if g.kind == GateKind.H:
        return _H
    if g.kind == GateKind.X:
        return _X
    if g.kind == GateKind.RY:
        return _ry(g.params[0])
    if g.kind == GateKind.RZ:
        return _rz(g.params[0])
    if g.kind == GateKind.CX:
        return _CX
    if g.kind == GateKind.SWAP:
        return _SWAP
    if g.kind == GateKind.CP:
        return np.diag([1, 1, 1, np.exp(1j * g.params[0])]).astype(complex)
    raise ValueError(f"no unitary for {g.kind}")


# -- types --------------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (2**self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    rho: np.ndarray

    def __post_init__(self):
        dim = 2**self.n_qubits
        if self.rho.shape != (dim, dim):
            raise ValueError("density matrix has wrong shape")

    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probability after each 1q/2q gate plus readout flip rates."""

    p1: float = 0.0
    p2: float = 0.0
    readout_p01: float = 0.0  # P(read 1 | true 0)
    readout_p10: float = 0.0  # P(read 0 | true 1)

    def __post_init__(self):
        for name in ("p1", "p2", "readout_p01", "readout_p10"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")

    @staticmethod
    def default() -> "NoiseModel":
        return NoiseModel(p1=1e-3, p2=1e-2, readout_p01=2e-2, readout_p10=2e-2)

    def is_zero(self) -> bool:
        return self.p1 == self.p2 == self.readout_p01 == self.readout_p10 == 0.0

    def scaled(self, factor: float) -> "NoiseModel":
        return NoiseModel(
            p1=min(1.0, self.p1 * factor),
            p2=min(1.0, self.p2 * factor),
            readout_p01=min(1.0, self.readout_p01 * factor),
            readout_p10=min(1.0, self.readout_p10 * factor),
        )

    def to_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "readout_p01": self.readout_p01, "readout_p10": self.readout_p10}

    @staticmethod
    def from_dict(d: dict) -> "NoiseModel":
        return NoiseModel(
            p1=float(d["p1"]),
            p2=float(d["p2"]),
            readout_p01=float(d["readout_p01"]),
            readout_p10=float(d["readout_p10"]),
        )

    @staticmethod
    def load(path: str | Path) -> "NoiseModel":
        return NoiseModel.from_dict(json.loads(Path(path).read_text()))

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


@dataclass(frozen=True)
class Distribution:
    """Probability mass over fixed-width bitstrings; zero bins may be omitted."""

    n_bits: int
    probs: dict[str, float]
    shots: int | None = None

    def __post_init__(self):
        total = 0.0
        for key, p in self.probs.items():
            if len(key) != self.n_bits or set(key) - {"0", "1"}:
                raise ValueError(f"bad bitstring key {key!r} for n_bits={self.n_bits}")
            if not (-1e-12 <= p <= 1.0 + 1e-9):
                raise ValueError(f"probability {p} out of range for {key!r}")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if self.shots is not None:
            if self.shots < 1:
                raise ValueError("shots must be positive")
            for key, p in self.probs.items():
                if abs(p * self.shots - round(p * self.shots)) > 1e-6:
                    raise ValueError(f"probability of {key!r} is not a multiple of 1/shots")

    def prob(self, bitstring: str) -> float:
        return self.probs.get(bitstring, 0.0)

    def argmax(self) -> str:
        return max(sorted(self.probs), key=lambda k: self.probs[k])

    def support(self) -> list[str]:
        return sorted(self.probs)

    def as_vector(self) -> np.ndarray:
        vec = np.zeros(2**self.n_bits)
        for key, p in self.probs.items():
            vec[int(key, 2)] = p
        return vec

    def total_variation(self, other: "Distribution") -> float:
        if self.n_bits != other.n_bits:
            raise ValueError("bit-width mismatch")
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.prob(k) - other.prob(k)) for k in keys)

    @staticmethod
    def from_vector(vec: np.ndarray, n_bits: int, shots: int | None = None) -> "Distribution":
        probs = {}
        for idx, p in enumerate(vec):
            if p > 1e-15:
                probs[format(idx, f"0{n_bits}b")] = float(p)
        return Distribution(n_bits, probs, shots)

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "shots": self.shots,
            "probs": {k: self.probs[k] for k in sorted(self.probs)},
        }

    @staticmethod
    def from_dict(d: dict) -> "Distribution":
        return Distribution(
            n_bits=int(d["n_bits"]),
            probs={k: float(v) for k, v in d["probs"].items()},
            shots=None if d.get("shots") is None else int(d["shots"]),
        )

    @staticmethod
    def load(path: str | Path) -> "Distribution":
        return Distribution.from_dict(json.loads(Path(path).read_text()))

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


# -- statevector backend -------------------------------------------------------

_PERM_CACHE: dict[tuple, tuple] = {}


def _perm_to_tail(ndim: int, axes: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Permutation moving `axes` to the end (order kept), plus its inverse."""
    key = (ndim, axes)
    cached = _PERM_CACHE.get(key)
    if cached is None:
        fwd = tuple(a for a in range(ndim) if a not in axes) + axes
        inv = tuple(int(i) for i in np.argsort(fwd))
        cached = _PERM_CACHE[key] = (fwd, inv)
    return cached


def _apply_1q(psi: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    fwd, inv = _perm_to_tail(n, (n - 1 - q,))
    psi = psi.reshape([2] * n).transpose(fwd) @ u.T
    return psi.transpose(inv).reshape(-1)

def _apply_2q(psi: np.ndarray, u: np.ndarray, q0: int, q1: int, n: int) -> np.ndarray:
    fwd, inv = _perm_to_tail(n, (n - 1 - q0, n - 1 - q1))
    psi = psi.reshape([2] * n).transpose(fwd).reshape(-1, 4) @ u.T
    return psi.reshape([2] * n).transpose(inv).reshape(-1)


def apply_gate(psi: np.ndarray, g: Gate, n: int) -> np.ndarray:
    u = gate_unitary(g)
    if len(g.qubits) == 1:
        return _apply_1q(psi, u, g.qubits[0], n)
    return _apply_2q(psi, u, g.qubits[0], g.qubits[1], n)


def statevector(c: Circuit) -> StateVector:
    """Exact pure-state evolution from |0...0>."""
    psi = np.zeros(2**c.n_qubits, dtype=complex)
    psi[0] = 1.0
    for g in c.gates:
        psi = apply_gate(psi, g, c.n_qubits)
    return StateVector(c.n_qubits, psi)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix of the circuit; intended for small n."""
    dim = 2**c.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        for col in range(dim):
            u[:, col] = apply_gate(np.ascontiguousarray(u[:, col]), g, c.n_qubits)
    return u


# -- density-matrix backend ----------------------------------------------------


def _rho_apply_unitary(rt: np.ndarray, u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    # rho' = U rho U^dagger: apply U along row axes, conj(U) along column axes
    return _apply_superop(rt, np.kron(u, u.conj()), qubits, n)


def _apply_superop(rt: np.ndarray, sup: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a dim^2 x dim^2 superoperator to the (row, col) block of the given qubits."""
    k = len(qubits)
    row = tuple(n - 1 - q for q in qubits)
    col = tuple(2 * n - 1 - q for q in qubits)
    fwd, inv = _perm_to_tail(2 * n, row + col)
    t = rt.transpose(fwd).reshape(-1, 4**k) @ sup.T
    return t.reshape([2] * (2 * n)).transpose(inv)


def _replace_with_mixed(rt: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Trace out the given qubits and re-insert them maximally mixed."""
    out = rt
    for q in qubits:
        axr, axc = n - 1 - q, 2 * n - 1 - q
        sl: list = [slice(None)] * (2 * n)
        sl[axr], sl[axc] = 0, 0
        s00 = tuple(sl)
        sl[axr], sl[axc] = 1, 1
        s11 = tuple(sl)
        half = 0.5 * (out[s00] + out[s11])
        out = np.zeros_like(out)
        out[s00] = half
        out[s11] = half
    return out


def _depolarizing_blend(p: float, k: int) -> float:
    # Pauli-twirl depolarizing rewritten as a blend with the fully mixed marginal:
    # p/3 over {X,Y,Z} gives weight 4p/3, p/15 over the 15 two-qubit Paulis 16p/15.
    return p * (4.0 / 3.0) if k == 1 else p * (16.0 / 15.0)


def depolarize(rt: np.ndarray, qubits: tuple[int, ...], p: float, n: int) -> np.ndarray:
    """Pauli-twirl depolarizing channel on 1 or 2 qubits of a rho tensor.

    E(rho) = (1-p) rho + p/3 sum_P P rho P (1q) or p/15 over the 15 non-identity
    two-qubit Paulis (2q); both reduce to a blend with the traced-out mixed state.
    """
    if p == 0.0:
        return rt
    blend = _depolarizing_blend(p, len(qubits))
    return (1.0 - blend) * rt + blend * _replace_with_mixed(rt, qubits, n)


def _mix_superop(k: int) -> np.ndarray:
    """Superoperator of rho -> tr(rho) I / dim on k qubits."""
    dim = 2**k
    diag = np.eye(dim, dtype=complex).reshape(-1)
    return np.outer(diag, diag) / dim


_MIX_SUP = {1: _mix_superop(1), 2: _mix_superop(2)}


def _noisy_gate_superop(g: Gate, nm: NoiseModel) -> np.ndarray:
    """Unitary conjugation followed by its depolarizing channel, as one matrix."""
    u = gate_unitary(g)
    sup = np.kron(u, u.conj())
    k = len(g.qubits)
    p = nm.p1 if k == 1 else nm.p2
    if p == 0.0:
        return sup
    blend = _depolarizing_blend(p, k)
    # the mixing term absorbs the unitary (trace is conjugation-invariant)
    return (1.0 - blend) * sup + blend * _MIX_SUP[k]


def density_matrix(c: Circuit, nm: NoiseModel) -> DensityMatrix:
    """Exact mixed-state evolution with a depolarizing channel after every gate."""
    n = c.n_qubits
    if n > MAX_DENSITY_QUBITS:
        raise ValueError(f"density-matrix simulation capped at {MAX_DENSITY_QUBITS} qubits, got {n}")
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    rt = rho.reshape([2] * (2 * n))
    cx_sup = None  # parameter-free, so shared by every CX in the circuit
    for g in c.gates:
        if g.kind == GateKind.CX:
            if cx_sup is None:
                cx_sup = _noisy_gate_superop(g, nm)
            sup = cx_sup
        else:
            sup = _noisy_gate_superop(g, nm)
        rt = _apply_superop(rt, sup, g.qubits, n)
    return DensityMatrix(n, rt.reshape(dim, dim))


# -- measurement ----------------------------------------------------------------


def _measured_marginal(probs: np.ndarray, measured: tuple[int, ...], n: int) -> np.ndarray:
    """Marginal over measured qubits, axes ordered so measured[0] is the MSB."""
    pt = probs.reshape([2] * n)
    keep = [n - 1 - q for q in measured]
    drop = tuple(ax for ax in range(n) if ax not in keep)
    if drop:
        pt = pt.sum(axis=drop)
    remaining = sorted(keep)  # axis order after summation
    order = [remaining.index(ax) for ax in keep]
    return pt.transpose(order).reshape(-1)


def _apply_readout(marg: np.ndarray, nm: NoiseModel, k: int) -> np.ndarray:
    if nm.readout_p01 == 0.0 and nm.readout_p10 == 0.0:
        return marg
    conf = np.array([[1.0 - nm.readout_p01, nm.readout_p10], [nm.readout_p01, 1.0 - nm.readout_p10]])
    pt = marg.reshape([2] * k)
    for ax in range(k):
        pt = np.moveaxis(np.moveaxis(pt, ax, -1) @ conf.T, -1, ax)
    return pt.reshape(-1)


def run_ideal(c: Circuit) -> Distribution:
    """Exact Born-rule distribution over the measured qubits."""
    if not c.measured_qubits:
        raise ValueError("circuit has no measured qubits")
    marg = _measured_marginal(statevector(c).probabilities(), c.measured_qubits, c.n_qubits)
    return Distribution.from_vector(marg / marg.sum(), len(c.measured_qubits))


def run_noisy(c: Circuit, nm: NoiseModel) -> Distribution:
    """Exact distribution under depolarizing gate noise and readout confusion."""
    if not c.measured_qubits:
        raise ValueError("circuit has no measured qubits")
    probs = np.maximum(density_matrix(c, nm).probabilities(), 0.0)
    marg = _measured_marginal(probs, c.measured_qubits, c.n_qubits)
    marg = _apply_readout(marg, nm, len(c.measured_qubits))
    return Distribution.from_vector(marg / marg.sum(), len(c.measured_qubits))


def sample_shots(d: Distribution, shots: int, seed: int) -> Distribution:
    """Deterministic multinomial draw; result carries the shot count."""
    if shots < 1:
        raise ValueError("shots must be positive")
    keys = d.support()
    pvec = np.array([d.probs[k] for k in keys])
    counts = np.random.default_rng(seed).multinomial(shots, pvec / pvec.sum())
    probs = {k: c / shots for k, c in zip(keys, counts) if c > 0}
    return Distribution(d.n_bits, probs, shots)
