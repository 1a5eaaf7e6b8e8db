"""Simulate quantum networks of agents exchanging qubits over noisy channels."""

from .agents import Agent, OutputSink, cconnect, qconnect
from .channels import (
    Attenuation, Chain, Conduit, Custom, ErrorModel, GroupCorruption, RandomUnitary,
    attenuation_drop_probability, haar_unitary, random_single_qubit_corruption,
)
from .errors import (
    BrokenLinkError, ConfigurationError, CrossSystemError, DeadlockError, HolderViolation,
    NumericalError, QNetSimError, RoutingError, ShapeError, SimulationError, SizeError, UsageError,
)
from .gates import (
    CNOT, CPHASE, CU, PHASE, RX, RY, RZ, SWAP, TOFFOLI, TOFOLLI, H, X, Y, Z,
    GateSpec, OperatorCache, apply_gate, build_qft, expand_operator, gate_matrix,
)
from .qstate import (
    DensityState, MeasurementOutcome, Precision, QubitRef,
    apply_unitary, measure_qubit, new_system, partial_trace,
)
from .qstream import EnsembleStore, new_stream
from .simulation import Simulation

__version__ = "0.1.0"
