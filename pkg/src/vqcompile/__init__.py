"""vqcompile: replace deep phase-estimation circuits with trained shallow
variational circuits that reproduce their measurement distributions.

Ships the circuit IR and text format, ideal/noisy simulators, the phase
estimation builder with its closed-form oracle, distribution metrics, the
derivative-free optimizers, the training loop, and the compile pass.
"""
from .ansatz import AnsatzSpec, Entangler, build_ansatz
from .circuits import (
    BasisCircuit,
    Circuit,
    CircuitError,
    Gate,
    GateKind,
    ParseError,
    Region,
    decompose_to_basis,
    depth,
    emit_circuit,
    parse_circuit,
)
from .compiler import CompileReport, CompileRequest, compile, substitute
from .metrics import chi_squared, cost, leakage
from .optimize import (
    ObjectiveHandle,
    OptimizerConfig,
    OptResult,
    OptStatus,
    cobyla_minimize,
    nelder_mead_minimize,
)
from .qpe import (
    PhaseSpec,
    PrecisionSpec,
    QpeInstance,
    analytic_qpe_distribution,
    build_iqft,
    build_qft,
    build_qpe,
    phase_estimate,
    precision_qubits,
)
from .simulator import (
    DensityMatrix,
    Distribution,
    NoiseModel,
    StateVector,
    density_matrix,
    run_ideal,
    run_noisy,
    sample_shots,
    statevector,
)
from .training import TrainReport, train

__version__ = "0.1.0"
