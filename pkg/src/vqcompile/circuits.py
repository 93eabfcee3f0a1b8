"""Circuit IR: gates, regions, text format, basis decomposition, and depth.

The text format is line-oriented (one statement per line, ``#`` comments,
``.qc`` extension by convention):

    qubits <N>                  -- must come first
    h <q> | x <q>
    ry <angle> <q> | rz <angle> <q>
    cx <qc> <qt> | swap <q1> <q2>
    cp <angle> <qc> <qt>
    @region <name> / @endregion
    measure <q1> <q2> ...       -- at most one, last statement

Angles are decimal radians (optional sign/exponent, no symbolic pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class CircuitError(ValueError):
    pass


class ParseError(CircuitError):
    """Syntax or semantic error in circuit text, with a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GateKind(Enum):
    H = "h"
    X = "x"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CP = "cp"
    SWAP = "swap"


# kind -> (n_params, n_qubits)
_ARITY = {
    GateKind.H: (0, 1),
    GateKind.X: (0, 1),
    GateKind.RY: (1, 1),
    GateKind.RZ: (1, 1),
    GateKind.CX: (0, 2),
    GateKind.CP: (1, 2),
    GateKind.SWAP: (0, 2),
}

BASIS_KINDS = frozenset({GateKind.RY, GateKind.RZ, GateKind.CX})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    params: tuple[float, ...] = ()
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        n_params, n_qubits = _ARITY[self.kind]
        if len(self.params) != n_params:
            raise CircuitError(f"{self.kind.value} takes {n_params} params, got {len(self.params)}")
        if len(self.qubits) != n_qubits:
            raise CircuitError(f"{self.kind.value} takes {n_qubits} qubits, got {len(self.qubits)}")
        if n_qubits == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.kind.value} qubits must be distinct")
        if any(q < 0 for q in self.qubits):
            raise CircuitError("qubit indices must be non-negative")
        if any(not math.isfinite(p) for p in self.params):
            raise CircuitError("gate angle must be finite")

    @staticmethod
    def h(q: int) -> "Gate":
        return Gate(GateKind.H, (), (q,))

    @staticmethod
    def x(q: int) -> "Gate":
        return Gate(GateKind.X, (), (q,))

    @staticmethod
    def ry(theta: float, q: int) -> "Gate":
        return Gate(GateKind.RY, (float(theta),), (q,))

    @staticmethod
    def rz(theta: float, q: int) -> "Gate":
        return Gate(GateKind.RZ, (float(theta),), (q,))

    @staticmethod
    def cx(control: int, target: int) -> "Gate":
        return Gate(GateKind.CX, (), (control, target))

    @staticmethod
    def cp(lam: float, control: int, target: int) -> "Gate":
        return Gate(GateKind.CP, (float(lam),), (control, target))

    @staticmethod
    def swap(q1: int, q2: int) -> "Gate":
        return Gate(GateKind.SWAP, (), (q1, q2))


@dataclass(frozen=True)
class Region:
    """Named half-open gate-index range [start, end); may be empty."""

    name: str
    start: int
    end: int


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    regions: tuple[Region, ...] = ()
    measured_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise CircuitError(f"gate {g.kind.value} uses qubit out of range for n={self.n_qubits}")
        if any(q < 0 or q >= self.n_qubits for q in self.measured_qubits):
            raise CircuitError("measured qubit out of range")
        if len(set(self.measured_qubits)) != len(self.measured_qubits):
            raise CircuitError("measured qubits must be distinct")
        regions = tuple(sorted(self.regions, key=lambda r: (r.start, r.end, r.name)))
        for r in regions:
            if not (0 <= r.start <= r.end <= len(self.gates)):
                raise CircuitError(f"region {r.name!r} out of bounds")
        for a, b in zip(regions, regions[1:]):
            if b.start < a.end:
                raise CircuitError(f"regions {a.name!r} and {b.name!r} overlap")
        object.__setattr__(self, "regions", regions)

    def region(self, name: str) -> Region:
        for r in self.regions:
            if r.name == name:
                return r
        raise CircuitError(f"no region named {name!r}")


class BasisCircuit(Circuit):
    """Circuit restricted to the {RY, RZ, CX} basis."""

    def __post_init__(self):
        super().__post_init__()
        for g in self.gates:
            if g.kind not in BASIS_KINDS:
                raise CircuitError(f"{g.kind.value} is not a basis gate")


# -- text format ------------------------------------------------------------


def parse_circuit(text: str) -> Circuit:
    """Parse circuit text; gate order matches source line order."""
    n_qubits = None
    gates: list[Gate] = []
    regions: list[Region] = []
    measured: tuple[int, ...] | None = None
    open_region: tuple[str, int, int] | None = None  # (name, start_gate, line)

    def angle(tok: str, lineno: int) -> float:
        try:
            val = float(tok)
        except ValueError:
            raise ParseError(lineno, f"malformed angle {tok!r}") from None
        if not math.isfinite(val):
            raise ParseError(lineno, f"malformed angle {tok!r}")
        return val

    def qubit(tok: str, lineno: int) -> int:
        try:
            q = int(tok)
        except ValueError:
            raise ParseError(lineno, f"malformed qubit index {tok!r}") from None
        if not (0 <= q < n_qubits):
            raise ParseError(lineno, f"qubit index {q} out of range (qubits {n_qubits})")
        return q

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        op, args = toks[0].lower(), toks[1:]

        if n_qubits is None:
            if op != "qubits":
                raise ParseError(lineno, "first statement must be 'qubits <N>'")
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError(lineno, "'qubits' takes one positive integer")
            n_qubits = int(args[0])
            continue
        if op == "qubits":
            raise ParseError(lineno, "duplicate 'qubits' statement")
        if measured is not None:
            raise ParseError(lineno, "'measure' must be the last statement")

        if op == "@region":
            if open_region is not None:
                raise ParseError(lineno, "nested @region (regions do not nest)")
            if len(args) != 1:
                raise ParseError(lineno, "@region takes one name")
            open_region = (args[0], len(gates), lineno)
        elif op == "@endregion":
            if open_region is None:
                raise ParseError(lineno, "@endregion without matching @region")
            if args:
                raise ParseError(lineno, "@endregion takes no arguments")
            name, start, _ = open_region
            regions.append(Region(name, start, len(gates)))
            open_region = None
        elif op == "measure":
            if not args:
                raise ParseError(lineno, "'measure' needs at least one qubit")
            if open_region is not None:
                raise ParseError(lineno, "'measure' inside @region")
            qs = tuple(qubit(a, lineno) for a in args)
            if len(set(qs)) != len(qs):
                raise ParseError(lineno, "measured qubits must be distinct")
            measured = qs
        elif op in ("h", "x"):
            if len(args) != 1:
                raise ParseError(lineno, f"'{op}' takes one qubit")
            gates.append(Gate(GateKind(op), (), (qubit(args[0], lineno),)))
        elif op in ("ry", "rz"):
            if len(args) != 2:
                raise ParseError(lineno, f"'{op}' takes an angle and a qubit")
            gates.append(Gate(GateKind(op), (angle(args[0], lineno),), (qubit(args[1], lineno),)))
        elif op in ("cx", "swap"):
            if len(args) != 2:
                raise ParseError(lineno, f"'{op}' takes two qubits")
            qs = (qubit(args[0], lineno), qubit(args[1], lineno))
            if qs[0] == qs[1]:
                raise ParseError(lineno, f"'{op}' qubits must be distinct")
            gates.append(Gate(GateKind(op), (), qs))
        elif op == "cp":
            if len(args) != 3:
                raise ParseError(lineno, "'cp' takes an angle and two qubits")
            qs = (qubit(args[1], lineno), qubit(args[2], lineno))
            if qs[0] == qs[1]:
                raise ParseError(lineno, "'cp' qubits must be distinct")
            gates.append(Gate(GateKind.CP, (angle(args[0], lineno),), qs))
        else:
            raise ParseError(lineno, f"unknown statement {toks[0]!r}")

    if n_qubits is None:
        raise ParseError(1, "empty program: missing 'qubits <N>'")
    if open_region is not None:
        raise ParseError(open_region[2], f"unclosed @region {open_region[0]!r}")
    return Circuit(n_qubits, tuple(gates), tuple(regions), measured or ())


def emit_circuit(c: Circuit) -> str:
    """Emit circuit text; parse_circuit(emit_circuit(c)) == c."""
    starts: dict[int, list[Region]] = {}
    for r in c.regions:
        starts.setdefault(r.start, []).append(r)
    lines = [f"qubits {c.n_qubits}"]
    open_end: int | None = None

    def flush_opens(i: int):
        nonlocal open_end
        for r in starts.get(i, ()):
            lines.append(f"@region {r.name}")
            if r.end == r.start:
                lines.append("@endregion")
            else:
                open_end = r.end

    for i, g in enumerate(c.gates):
        if open_end == i:
            lines.append("@endregion")
            open_end = None
        flush_opens(i)
        lines.append(_gate_line(g))
    if open_end == len(c.gates):
        lines.append("@endregion")
        open_end = None
    flush_opens(len(c.gates))
    if c.measured_qubits:
        lines.append("measure " + " ".join(str(q) for q in c.measured_qubits))
    return "\n".join(lines) + "\n"


def _gate_line(g: Gate) -> str:
    parts = [g.kind.value]
    parts += [repr(p) for p in g.params]  # repr round-trips floats exactly
    parts += [str(q) for q in g.qubits]
    return " ".join(parts)


# -- basis decomposition and depth -------------------------------------------

_PI = math.pi


def _decompose_gate(g: Gate) -> list[Gate]:
    if g.kind in BASIS_KINDS:
        return [g]
    if g.kind == GateKind.H:
        # H = RY(pi/2) RZ(pi) as operators, up to global phase
        q = g.qubits[0]
        return [Gate.rz(_PI, q), Gate.ry(_PI / 2, q)]
    if g.kind == GateKind.X:
        # X = RY(pi) RZ(pi) as operators, up to global phase
        q = g.qubits[0]
        return [Gate.rz(_PI, q), Gate.ry(_PI, q)]
    if g.kind == GateKind.CP:
        lam = g.params[0]
        c, t = g.qubits
        return [
            Gate.rz(lam / 2, c),
            Gate.cx(c, t),
            Gate.rz(-lam / 2, t),
            Gate.cx(c, t),
            Gate.rz(lam / 2, t),
        ]
    if g.kind == GateKind.SWAP:
        a, b = g.qubits
        return [Gate.cx(a, b), Gate.cx(b, a), Gate.cx(a, b)]
    raise CircuitError(f"cannot decompose {g.kind.value}")


def decompose_to_basis(c: Circuit) -> BasisCircuit:
    """Rewrite each gate locally into {RY, RZ, CX}; unitary preserved up to global phase."""
    gates: list[Gate] = []
    offsets = [0]
    for g in c.gates:
        gates.extend(_decompose_gate(g))
        offsets.append(len(gates))
    regions = tuple(Region(r.name, offsets[r.start], offsets[r.end]) for r in c.regions)
    return BasisCircuit(c.n_qubits, tuple(gates), regions, c.measured_qubits)


def depth(c: Circuit) -> int:
    """Greedy layered depth: each gate lands in the earliest layer after its qubits are free."""
    free = [0] * c.n_qubits
    d = 0
    for g in c.gates:
        layer = 1 + max(free[q] for q in g.qubits)
        for q in g.qubits:
            free[q] = layer
        d = max(d, layer)
    return d
