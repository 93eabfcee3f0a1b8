"""Phase estimation for a diagonal single-qubit unitary diag(1, e^{2*pi*i*theta}).

Builds the estimation circuit (storage qubit in |1>, controlled phases, inverse
QFT), evaluates the closed-form outcome distribution, and converts measured
bitstrings back to phase estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .circuits import Circuit, Gate
from .simulator import Distribution

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseSpec:
    """Phase as a fraction of 2*pi, in [0, 1)."""

    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta < 1.0):
            raise ValueError(f"theta must be in [0, 1), got {self.theta}")


@dataclass(frozen=True)
class PrecisionSpec:
    n: int
    epsilon: float
    t: int

    def __post_init__(self):
        if self.t < self.n:
            raise ValueError("register size t must be at least n")

    @staticmethod
    def for_target(n: int, epsilon: float) -> "PrecisionSpec":
        return PrecisionSpec(n, epsilon, precision_qubits(n, epsilon))


@dataclass(frozen=True)
class QpeInstance:
    phase: PhaseSpec
    t: int
    circuit: Circuit


def precision_qubits(n: int, epsilon: float) -> int:
    """Counting qubits needed for n binary digits with failure probability <= epsilon."""
    if n < 1:
        raise ValueError("n must be positive")
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return n + math.ceil(math.log2(2.0 + 1.0 / (2.0 * epsilon)))


def build_iqft(qubits: list[int], n_qubits: int | None = None) -> Circuit:
    """Inverse QFT fragment on the given qubits (listed most significant first).

    Qubit-reversal SWAPs are included, so on input sum_m e^{2*pi*i*theta*m}|m>
    the peaked readout lands directly in the listed bit order.
    """
    if not qubits:
        raise ValueError("need at least one qubit")
    n = n_qubits if n_qubits is not None else max(qubits) + 1
    t = len(qubits)
    gates: list[Gate] = []
    for i in range(t // 2):
        gates.append(Gate.swap(qubits[i], qubits[t - 1 - i]))
    for i in range(t - 1, -1, -1):
        for j in range(t - 1, i, -1):
            gates.append(Gate.cp(-math.pi / 2 ** (j - i), qubits[j], qubits[i]))
        gates.append(Gate.h(qubits[i]))
    return Circuit(n, tuple(gates))


def build_qft(qubits: list[int], n_qubits: int | None = None) -> Circuit:
    """Forward QFT fragment (inverse of build_iqft): reversed gates, negated angles."""
    inv = build_iqft(qubits, n_qubits)
    gates = []
    for g in reversed(inv.gates):
        if g.params:
            gates.append(Gate(g.kind, tuple(-p for p in g.params), g.qubits))
        else:
            gates.append(g)
    return Circuit(inv.n_qubits, tuple(gates))


def build_qpe(phase: PhaseSpec, t: int) -> QpeInstance:
    """Estimation circuit on t counting qubits (0..t-1) plus storage qubit t.

    The counting register is measured most significant qubit first, so the
    printed bitstring is the binary expansion of the phase numerator m.
    """
    if t < 1:
        raise ValueError("t must be positive")
    storage = t
    gates: list[Gate] = [Gate.x(storage)]
    gates += [Gate.h(q) for q in range(t)]
    for k in range(t):
        gates.append(Gate.cp(TWO_PI * phase.theta * 2**k % TWO_PI, k, storage))
    counting_msb_first = list(range(t - 1, -1, -1))
    gates += build_iqft(counting_msb_first, t + 1).gates
    circuit = Circuit(t + 1, tuple(gates), measured_qubits=tuple(counting_msb_first))
    return QpeInstance(phase, t, circuit)


def analytic_qpe_distribution(phase: PhaseSpec, t: int) -> Distribution:
    """Closed-form outcome law: P(m) = sin^2(2^t pi d) / (4^t sin^2(pi d)), d = theta - m/2^t."""
    if not (1 <= t <= 20):
        raise ValueError("t must be in 1..20")
    size = 2**t
    probs = {}
    for m in range(size):
        delta = phase.theta - m / size
        s = math.sin(math.pi * delta)
        if s == 0.0:
            p = 1.0
        else:
            p = math.sin(size * math.pi * delta) ** 2 / (size**2 * s**2)
        if p > 1e-15:
            probs[format(m, f"0{t}b")] = p
    return Distribution(t, probs)


def phase_estimate(bitstring: str) -> float:
    """Phase value m / 2^t encoded by an MSB-first t-bit outcome."""
    if not bitstring or set(bitstring) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bitstring!r}")
    return int(bitstring, 2) / 2 ** len(bitstring)
