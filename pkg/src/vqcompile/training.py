"""Training loop: fit ansatz parameters so the simulated measurement
distribution matches a target.

The objective is the L1 cost on *exact* simulated probabilities (ideal or
noisy), keeping it deterministic for the optimizer; shot sampling enters only
in the reported chi-squared evaluations.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import AnsatzSpec, build_ansatz
from .circuits import Circuit, emit_circuit
from .metrics import chi_squared, cost
from .optimize import ObjectiveHandle, OptimizerConfig, OptResult, cobyla_minimize
from .simulator import Distribution, NoiseModel, run_ideal, run_noisy, sample_shots


@dataclass
class TrainReport:
    spec: AnsatzSpec
    best_params: np.ndarray
    cost_history: list[float]
    final_cost: float
    chi2_ideal_eval: float
    chi2_noisy_eval: float
    evaluations: int
    seed: int
    wall_time: float
    status: str
    circuit: Circuit = field(repr=False)
    eval_shots: int | None = 4096

    def to_dict(self, history_stride: int = 1) -> dict:
        return {
            "spec": {"n_qubits": self.spec.n_qubits, "p": self.spec.p, "entangler": self.spec.entangler.value},
            "best_params": [float(v) for v in self.best_params],
            "cost_history": [float(v) for v in self.cost_history[::history_stride]],
            "history_stride": history_stride,
            "final_cost": self.final_cost,
            "chi2_ideal_eval": self.chi2_ideal_eval,
            "chi2_noisy_eval": self.chi2_noisy_eval,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "status": self.status,
            "eval_shots": self.eval_shots,
            "circuit": emit_circuit(self.circuit),
        }

    def save(self, path: str | Path, history_stride: int = 1):
        Path(path).write_text(json.dumps(self.to_dict(history_stride), indent=2, sort_keys=True) + "\n")


def initial_params(spec: AnsatzSpec, rng: np.random.Generator) -> np.ndarray:
    """Independent uniform angles on [0, 2*pi)."""
    return rng.uniform(0.0, 2.0 * np.pi, spec.param_count)


def train(
    spec: AnsatzSpec,
    gt: Distribution,
    noise: NoiseModel | None = None,
    config: OptimizerConfig = OptimizerConfig(),
    seed: int = 0,
    restarts: int = 1,
    eval_shots: int | None = 4096,
    eval_noise: NoiseModel | None = None,
) -> TrainReport:
    """Minimize the L1 distance between the ansatz distribution and `gt`.

    `noise=None` trains against the ideal simulator, otherwise against the
    exact noisy simulator. The report evaluates the trained circuit under both
    (sampled at `eval_shots` when set); the noisy evaluation uses `eval_noise`,
    defaulting to the training noise or the stock model.
    """
    if gt.n_bits != spec.n_qubits:
        raise ValueError(f"target width {gt.n_bits} does not match ansatz qubits {spec.n_qubits}")
    if restarts < 1:
        raise ValueError("restarts must be positive")

    if noise is None:
        simulate = run_ideal
    else:
        simulate = lambda c: run_noisy(c, noise)  # noqa: E731

    def objective(x: np.ndarray) -> float:
        return cost(simulate(build_ansatz(spec, x)), gt)

    t_start = time.perf_counter()
    rng = np.random.default_rng(seed)
    best: OptResult | None = None
    history: list[float] = []
    evaluations = 0
    for _ in range(restarts):
        x0 = initial_params(spec, rng)
        result = cobyla_minimize(ObjectiveHandle(spec.param_count, objective), x0, config)
        history.extend(result.history)
        evaluations += result.evals_used
        if best is None or result.best_f < best.best_f:
            best = result

    circuit = build_ansatz(spec, best.best_x)
    scoring_noise = eval_noise or noise or NoiseModel.default()
    dist_ideal = run_ideal(circuit)
    dist_noisy = run_noisy(circuit, scoring_noise)
    if eval_shots:
        dist_ideal = sample_shots(dist_ideal, eval_shots, seed)
        dist_noisy = sample_shots(dist_noisy, eval_shots, seed)

    return TrainReport(
        spec=spec,
        best_params=best.best_x,
        cost_history=history,
        final_cost=best.best_f,
        chi2_ideal_eval=chi_squared(dist_ideal, gt),
        chi2_noisy_eval=chi_squared(dist_noisy, gt),
        evaluations=evaluations,
        seed=seed,
        wall_time=time.perf_counter() - t_start,
        status=best.status.value,
        circuit=circuit,
        eval_shots=eval_shots,
    )
