"""Hardware-efficient variational ansatz: RY/RZ rotation layers with CX entanglers.

The template is a rotation layer followed by p repetitions of (entangler,
rotation layer). The linear entangler is a nearest-neighbour CX chain with
depth growing as O(p*n); the full entangler couples all pairs, O(p*n^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .circuits import Circuit, Gate


class Entangler(Enum):
    NONE = "none"
    LINEAR = "linear"
    FULL = "full"

    @staticmethod
    def parse(name: str) -> "Entangler":
        try:
            return Entangler(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown entangler {name!r} (expected none/linear/full)") from None


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    p: int
    entangler: Entangler = Entangler.NONE

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if self.p < 0:
            raise ValueError("layer count p must be non-negative")
        if self.p == 0:
            object.__setattr__(self, "entangler", Entangler.NONE)

    @property
    def param_count(self) -> int:
        return 2 * self.n_qubits * (self.p + 1)

    def label(self) -> str:
        return f"VQC({self.p}, {self.entangler.value})"


def _entangler_gates(spec: AnsatzSpec) -> list[Gate]:
    n = spec.n_qubits
    if spec.entangler == Entangler.LINEAR:
        return [Gate.cx(q, q + 1) for q in range(n - 1)]
    if spec.entangler == Entangler.FULL:
        return [Gate.cx(i, j) for i in range(n) for j in range(i + 1, n)]
    return []


def build_ansatz(spec: AnsatzSpec, params: Sequence[float]) -> Circuit:
    """Instantiate the template; parameters are consumed qubit by qubit, RY then RZ."""
    if len(params) != spec.param_count:
        raise ValueError(f"expected {spec.param_count} parameters, got {len(params)}")
    gates: list[Gate] = []
    it = iter(params)
    for layer in range(spec.p + 1):
        if layer > 0:
            gates += _entangler_gates(spec)
        for q in range(spec.n_qubits):
            gates.append(Gate.ry(next(it), q))
            gates.append(Gate.rz(next(it), q))
    return Circuit(spec.n_qubits, tuple(gates), measured_qubits=tuple(range(spec.n_qubits)))
