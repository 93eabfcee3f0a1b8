"""End-to-end compilation pass: simulate a deep circuit's target distribution,
train shallow variational replacements under the given noise model, pick the
best one, and splice it in.

Only terminal (measured) regions can be replaced: the pass matches
measurement distributions, which says nothing about a region's output state
feeding further unitaries.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .ansatz import AnsatzSpec, build_ansatz
from .circuits import BasisCircuit, Circuit, CircuitError, Region, decompose_to_basis, depth, emit_circuit
from .metrics import chi_squared
from .optimize import OptimizerConfig
from .simulator import Distribution, NoiseModel, run_ideal, run_noisy, sample_shots
from .training import TrainReport, train


@dataclass(frozen=True)
class CompileRequest:
    circuit: Circuit
    noise: NoiseModel
    search_space: tuple[AnsatzSpec, ...]
    seeds: tuple[int, ...]
    region: str | None = None  # default: the whole circuit up to measurement
    shots: int = 4096
    hardware_noise: NoiseModel | None = None  # harsher stand-in for device execution
    optimizer: OptimizerConfig = OptimizerConfig()

    def __post_init__(self):
        if not self.search_space:
            raise ValueError("search_space must be non-empty")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.shots < 1:
            raise ValueError("shots must be positive")


@dataclass
class SeedStats:
    values: list[float]

    @property
    def median(self) -> float:
        return statistics.median(self.values)

    @property
    def iqr(self) -> float:
        if len(self.values) < 2:
            return 0.0
        q = statistics.quantiles(self.values, n=4, method="inclusive")
        return q[2] - q[0]

    def to_dict(self) -> dict:
        return {"median": self.median, "iqr": self.iqr, "values": self.values}


@dataclass
class Candidate:
    spec: AnsatzSpec
    basis_depth: int
    chi2_noisy: SeedStats
    chi2_ideal: SeedStats
    reports: list[TrainReport] = field(repr=False)

    @property
    def best_report(self) -> TrainReport:
        return min(self.reports, key=lambda r: r.chi2_noisy_eval)

    def to_dict(self) -> dict:
        return {
            "spec": {"n_qubits": self.spec.n_qubits, "p": self.spec.p, "entangler": self.spec.entangler.value},
            "basis_depth": self.basis_depth,
            "chi2_noisy": self.chi2_noisy.to_dict(),
            "chi2_ideal": self.chi2_ideal.to_dict(),
        }


@dataclass
class CompileReport:
    chosen_spec: AnsatzSpec | None
    substituted: bool
    original_depth: int
    compiled_depth: int
    chi2_original_noisy: SeedStats
    chi2_compiled_noisy: SeedStats
    chi2_compiled_ideal: SeedStats
    ground_truth: Distribution
    compiled_circuit: Circuit
    candidates: list[Candidate]
    chi2_original_hw: SeedStats | None = None
    chi2_compiled_hw: SeedStats | None = None

    def to_dict(self) -> dict:
        d = {
            "chosen_spec": None
            if self.chosen_spec is None
            else {"n_qubits": self.chosen_spec.n_qubits, "p": self.chosen_spec.p,
                  "entangler": self.chosen_spec.entangler.value},
            "substituted": self.substituted,
            "original_depth": self.original_depth,
            "compiled_depth": self.compiled_depth,
            "chi2_original_noisy": self.chi2_original_noisy.to_dict(),
            "chi2_compiled_noisy": self.chi2_compiled_noisy.to_dict(),
            "chi2_compiled_ideal": self.chi2_compiled_ideal.to_dict(),
            "ground_truth": self.ground_truth.to_dict(),
            "compiled_circuit": emit_circuit(self.compiled_circuit),
            "candidates": [c.to_dict() for c in self.candidates],
        }
        if self.chi2_original_hw is not None:
            d["chi2_original_hw"] = self.chi2_original_hw.to_dict()
        if self.chi2_compiled_hw is not None:
            d["chi2_compiled_hw"] = self.chi2_compiled_hw.to_dict()
        return d

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def _resolve_region(c: Circuit, name: str | None) -> Region:
    if name is None:
        return Region("<all>", 0, len(c.gates))
    region = c.region(name)  # raises if absent
    if region.end != len(c.gates):
        raise CircuitError(
            f"region {name!r} is not terminal; only regions ending at the measurement can be replaced"
        )
    return region


def substitute(c: Circuit, region_name: str | None, replacement: Circuit) -> Circuit:
    """Replace a terminal region's gates with a circuit acting on the measured qubits.

    The replacement's measured qubits are mapped index-wise onto the original's;
    its remaining qubits go to the remaining original qubits in ascending order.
    """
    region = _resolve_region(c, region_name)
    if region.end == region.start:
        raise CircuitError(f"region {region.name!r} covers zero gates")
    if replacement.n_qubits > c.n_qubits:
        raise CircuitError("replacement uses more qubits than the original circuit")
    if len(replacement.measured_qubits) != len(c.measured_qubits):
        raise CircuitError(
            f"qubit-mapping conflict: replacement measures {len(replacement.measured_qubits)} "
            f"qubits, original measures {len(c.measured_qubits)}"
        )
    mapping = dict(zip(replacement.measured_qubits, c.measured_qubits))
    spare = iter(sorted(set(range(c.n_qubits)) - set(mapping.values())))
    for q in range(replacement.n_qubits):
        if q not in mapping:
            mapping[q] = next(spare)

    mapped = tuple(
        type(g)(g.kind, g.params, tuple(mapping[q] for q in g.qubits)) for g in replacement.gates
    )
    gates = c.gates[: region.start] + mapped + c.gates[region.end :]
    shift = len(mapped) - (region.end - region.start)
    regions = []
    for r in c.regions:
        if r.start == region.start and r.end == region.end and r.name == region.name:
            regions.append(Region(r.name, region.start, region.start + len(mapped)))
        elif r.end <= region.start:
            regions.append(r)
        elif r.start >= region.end:
            regions.append(Region(r.name, r.start + shift, r.end + shift))
    return Circuit(c.n_qubits, gates, tuple(regions), c.measured_qubits)


def _sampled_chi2(dist: Distribution, gt: Distribution, shots: int, seeds) -> SeedStats:
    return SeedStats([chi_squared(sample_shots(dist, shots, s), gt) for s in seeds])


def compile(req: CompileRequest) -> CompileReport:  # noqa: A001 (domain verb, like re.compile)
    """Run the full pass; on do-no-harm fallback the original circuit is returned
    unchanged with substituted=False."""
    c = req.circuit
    if not c.measured_qubits:
        raise CircuitError("circuit has no measurement to match")
    region = _resolve_region(c, req.region)
    if region.end == region.start:
        raise CircuitError(f"region {region.name!r} covers zero gates")

    gt = run_ideal(c)
    basis_original = decompose_to_basis(c)
    original_depth = depth(basis_original)
    noisy_original = run_noisy(basis_original, req.noise)
    chi2_original = _sampled_chi2(noisy_original, gt, req.shots, req.seeds)

    candidates: list[Candidate] = []
    for spec in req.search_space:
        reports = [
            train(spec, gt, noise=req.noise, config=req.optimizer, seed=s, eval_shots=req.shots)
            for s in req.seeds
        ]
        candidates.append(
            Candidate(
                spec=spec,
                basis_depth=depth(decompose_to_basis(build_ansatz(spec, reports[0].best_params))),
                chi2_noisy=SeedStats([r.chi2_noisy_eval for r in reports]),
                chi2_ideal=SeedStats([r.chi2_ideal_eval for r in reports]),
                reports=reports,
            )
        )

    order = {s: i for i, s in enumerate(req.search_space)}
    chosen = min(candidates, key=lambda k: (k.chi2_noisy.median, k.basis_depth, k.spec.p, order[k.spec]))

    accepted = chosen.chi2_noisy.median <= chi2_original.median and chosen.basis_depth <= original_depth
    hw = req.hardware_noise
    if not accepted:
        return CompileReport(
            chosen_spec=None,
            substituted=False,
            original_depth=original_depth,
            compiled_depth=original_depth,
            chi2_original_noisy=chi2_original,
            chi2_compiled_noisy=chi2_original,
            chi2_compiled_ideal=_sampled_chi2(gt, gt, req.shots, req.seeds),
            ground_truth=gt,
            compiled_circuit=c,
            candidates=candidates,
            chi2_original_hw=None if hw is None else _sampled_chi2(run_noisy(basis_original, hw), gt, req.shots, req.seeds),
            chi2_compiled_hw=None,
        )

    compiled = substitute(c, req.region, chosen.best_report.circuit)
    report = CompileReport(
        chosen_spec=chosen.spec,
        substituted=True,
        original_depth=original_depth,
        compiled_depth=depth(decompose_to_basis(compiled)),
        chi2_original_noisy=chi2_original,
        chi2_compiled_noisy=chosen.chi2_noisy,
        chi2_compiled_ideal=chosen.chi2_ideal,
        ground_truth=gt,
        compiled_circuit=compiled,
        candidates=candidates,
    )
    if hw is not None:
        report.chi2_original_hw = _sampled_chi2(run_noisy(basis_original, hw), gt, req.shots, req.seeds)
        report.chi2_compiled_hw = _sampled_chi2(
            run_noisy(decompose_to_basis(compiled), hw), gt, req.shots, req.seeds
        )
    return report
