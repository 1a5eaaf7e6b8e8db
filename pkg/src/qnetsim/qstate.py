"""Multi-qubit quantum systems stored as density matrices.

Basis ordering: qubit 0 is the most significant bit, so the basis state
``|q0 q1 ... q_{N-1}>`` has matrix index ``int("q0q1...q_{N-1}", 2)``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError, ShapeError, SizeError, UsageError
from .rng import current_rng

if TYPE_CHECKING:
    from .qstream import EnsembleStore

#: Largest system :func:`new_system` / :func:`new_stream` will allocate.
MAX_QUBITS = 12

#: When true, :func:`apply_unitary` verifies unitarity of every operator.
VALIDATE = False

#: Below this, both outcome probabilities are treated as a corrupt state.
CORRUPT_THRESHOLD = 1e-12


class Precision(str, enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self):
        return np.dtype(np.complex64 if self is Precision.SINGLE else np.complex128)

    @property
    def tol(self):
        return 1e-4 if self is Precision.SINGLE else 1e-9

    @classmethod
    def of(cls, value) -> "Precision":
        if isinstance(value, Precision):
            return value
        if value is None:
            return cls.DOUBLE
        if isinstance(value, str) and value in ("single", "double"):
            return cls(value)
        dt = np.dtype(value)
        if dt == np.complex64:
            return cls.SINGLE
        if dt == np.complex128:
            return cls.DOUBLE
        raise ValueError(f"unsupported precision {value!r}")


def check_size(n_qubits: int) -> None:
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise SizeError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    if n_qubits > MAX_QUBITS:
        raise SizeError(f"{n_qubits} qubits exceeds the limit of {MAX_QUBITS}")


@dataclass(frozen=True)
class MeasurementOutcome:
    bit: int
    probability: float

    def __int__(self):
        return self.bit

    def __index__(self):
        return self.bit


@dataclass(frozen=True)
class QubitRef:
    """Handle to one qubit of one system in an ensemble; never owns state."""

    stream_id: int
    system_index: int
    qubit_index: int
    stream: "EnsembleStore" = field(compare=False, repr=False)

    @property
    def system(self) -> "DensityState":
        return self.stream.system_at(self.system_index)

    @property
    def key(self):
        return (self.stream_id, self.system_index, self.qubit_index)

    def measure(self, rng=None) -> int:
        """Measure in the computational basis and return the bit."""
        return self.system.measure_qubit(self.qubit_index, rng).bit


class DensityState:
    """An N-qubit density matrix living in a slot of an :class:`EnsembleStore`.

    ``matrix`` aliases the store's memory; every method mutates it in place.
    """

    __slots__ = ("matrix", "stream", "index", "n_qubits")

    def __init__(self, matrix: np.ndarray, stream: "EnsembleStore", index: int = 0):
        dim = matrix.shape[0]
        n = dim.bit_length() - 1
        if matrix.ndim != 2 or matrix.shape != (dim, dim) or dim != 1 << n or n < 1:
            raise ShapeError(f"density matrix must be 2^N x 2^N, got {matrix.shape}")
        self.matrix = matrix
        self.stream = stream
        self.index = index
        self.n_qubits = n

    @property
    def precision(self) -> Precision:
        return Precision.of(self.matrix.dtype)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def qubits(self) -> tuple[QubitRef, ...]:
        return tuple(self.qubit(k) for k in range(self.n_qubits))

    def qubit(self, k: int) -> QubitRef:
        if not 0 <= k < self.n_qubits:
            raise IndexError(f"qubit index {k} out of range for {self.n_qubits} qubits")
        return QubitRef(self.stream.id, self.index, k, self.stream)

    def apply(self, u, check=None) -> None:
        apply_unitary(self, u, check)

    def measure_qubit(self, k: int, rng=None) -> MeasurementOutcome:
        return measure_qubit(self, k, rng)

    def partial_trace(self, keep) -> "DensityState":
        return partial_trace(self, keep)

    def outcome_probabilities(self, k: int) -> np.ndarray:
        """``[p0, p1]`` for measuring qubit ``k``, without collapsing."""
        a, b = 1 << k, 1 << (self.n_qubits - k - 1)
        diag = np.real(np.diagonal(self.matrix)).reshape(a, 2, b)
        return diag.sum(axis=(0, 2))

    def to_json(self) -> str:
        flat = self.matrix.astype(np.complex128).ravel()
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "precision": self.precision.value,
                "matrix": [[float(z.real), float(z.imag)] for z in flat],
            }
        )

    def copy(self) -> np.ndarray:
        return self.matrix.copy()

    def __repr__(self):
        return f"DensityState(n_qubits={self.n_qubits}, precision={self.precision.value}, index={self.index})"


def new_system(n_qubits: int, precision="double") -> DensityState:
    """Allocate one system in ``|0...0><0...0|``."""
    from .qstream import new_stream

    return new_stream(n_qubits, 1, precision).system_at(0)


def from_matrix(matrix, precision=None) -> DensityState:
    """Wrap a copy of ``matrix`` in a fresh single-system store."""
    matrix = np.asarray(matrix)
    prec = Precision.of(precision if precision is not None else
                        (matrix.dtype if np.iscomplexobj(matrix) else "double"))
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise ShapeError(f"density matrix must be 2^N x 2^N, got {matrix.shape}")
    state = new_system(n, prec)
    state.matrix[...] = matrix
    return state


def from_json(text: str) -> DensityState:
    data = json.loads(text)
    n = data["n_qubits"]
    flat = np.array([complex(re, im) for re, im in data["matrix"]])
    return from_matrix(flat.reshape(1 << n, 1 << n), data.get("precision", "double"))


def is_unitary(u, tol=1e-9) -> bool:
    u = u.toarray() if sp.issparse(u) else np.asarray(u)
    return np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=tol, rtol=0)


def apply_unitary(state: DensityState, u, check=None) -> None:
    """Replace the state by ``U rho U^dagger`` in place.

    ``u`` may be a dense array or a scipy sparse matrix. Unitarity is only
    verified when ``check`` is true (or :data:`VALIDATE` is set).
    """
    rho = state.matrix
    if u.shape != rho.shape:
        raise ShapeError(f"operator shape {u.shape} does not match state shape {rho.shape}")
    if check or (check is None and VALIDATE):
        if not is_unitary(u, max(state.precision.tol, 1e-6)):
            raise ValueError("operator is not unitary")
    if sp.issparse(u):
        left = u @ rho
        rho[...] = (u @ left.conj().T).conj().T
    else:
        rho[...] = u @ rho @ u.conj().T


def measure_qubit(state: DensityState, k: int, rng=None) -> MeasurementOutcome:
    """Projectively measure qubit ``k`` and collapse the state in place.

    The dimension of the state is kept; the measured qubit is left in the
    observed basis state.
    """
    n = state.n_qubits
    if not 0 <= k < n:
        raise IndexError(f"qubit index {k} out of range for {n} qubits")
    rng = rng if rng is not None else current_rng()
    p = state.outcome_probabilities(k)
    p = np.clip(p, 0.0, None)
    if p.max() < CORRUPT_THRESHOLD:
        raise NumericalError(f"outcome probabilities {p.tolist()} vanish; state is corrupt")
    p = p / p.sum()
    bit = 1 if rng.random() < p[1] else 0
    a, b = 1 << k, 1 << (n - k - 1)
    view = state.matrix.reshape(a, 2, b, a, 2, b)
    other = 1 - bit
    view[:, other] = 0
    view[:, :, :, :, other] = 0
    state.matrix /= p[bit]
    return MeasurementOutcome(bit, float(p[bit]))


def _validate_keep(keep, n):
    keep = [int(q) for q in keep]
    if not keep:
        raise IndexError("keep must name at least one qubit")
    if len(set(keep)) != len(keep):
        raise IndexError(f"duplicate qubit indices in {keep}")
    for q in keep:
        if not 0 <= q < n:
            raise IndexError(f"qubit index {q} out of range for {n} qubits")
    return keep


def reduced_matrix(matrix: np.ndarray, keep) -> np.ndarray:
    """Partial trace of a raw density matrix, kept qubits in ``keep`` order."""
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    keep = _validate_keep(keep, n)
    tensor = matrix.reshape((2,) * (2 * n))
    rows = list(range(n))
    cols = [q if q not in keep else n + q for q in range(n)]
    out = [q for q in keep] + [n + q for q in keep]
    reduced = np.einsum(tensor, rows + cols, out)
    m = 1 << len(keep)
    return reduced.reshape(m, m)


def partial_trace(state: DensityState, keep) -> DensityState:
    """Reduced state of the qubits in ``keep``, tracing out the rest."""
    return from_matrix(reduced_matrix(state.matrix, keep), state.precision)
