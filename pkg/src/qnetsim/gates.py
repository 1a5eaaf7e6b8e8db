"""Built-in gates, identity padding, operator caching and the QFT circuit.

Gate functions take :class:`~qnetsim.qstate.QubitRef` arguments, return
nothing and modify the parent system in place::

    a, b = new_system(2).qubits
    H(a)
    CNOT(a, b)

The full ``2^N x 2^N`` operator for each (gate, targets, N) combination is
built once from projector sums and Kronecker products, then cached. Cached
operators are kept in CSR form; every expanded gate has at most ``2^arity``
nonzeros per row, so applying one costs ``O(2^arity * 4^N)`` instead of a
dense ``O(8^N)`` product.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import CrossSystemError, ShapeError
from .qstate import apply_unitary

ARITY = {
    "H": 1, "X": 1, "Y": 1, "Z": 1,
    "RX": 1, "RY": 1, "RZ": 1, "PHASE": 1,
    "CNOT": 2, "CPHASE": 2, "CU": 2, "SWAP": 2,
    "TOFFOLI": 3,
}
_ANGLE_GATES = {"RX", "RY", "RZ", "PHASE", "CPHASE"}

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)

FINGERPRINT_DIGITS = 12


def _rotation(pauli, theta):
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * pauli


def _phase(phi):
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


@dataclass(frozen=True, eq=False)
class GateSpec:
    name: str
    params: tuple = ()
    unitary: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        name = self.name.upper()
        if name == "TOFOLLI":
            name = "TOFFOLI"
        if name not in ARITY:
            raise ValueError(f"unknown gate {self.name!r}")
        object.__setattr__(self, "name", name)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        want = 1 if name in _ANGLE_GATES else 0
        if len(params) != want:
            raise ValueError(f"{name} takes {want} angle parameter(s), got {len(params)}")
        if name == "CU":
            if self.unitary is None:
                raise ValueError("CU requires a 2x2 unitary")
            u = np.asarray(self.unitary, dtype=complex)
            if u.shape != (2, 2) or not np.allclose(u @ u.conj().T, I2, atol=1e-9):
                raise ValueError("CU requires a 2x2 unitary")
            object.__setattr__(self, "unitary", u)
        elif self.unitary is not None:
            raise ValueError(f"{name} does not take a unitary")

    @property
    def arity(self) -> int:
        return ARITY[self.name]

    def fingerprint(self):
        angles = tuple(round(p, FINGERPRINT_DIGITS) for p in self.params)
        if self.unitary is None:
            return (self.name, angles)
        u = np.round(self.unitary, FINGERPRINT_DIGITS) + 0.0
        return (self.name, angles, u.tobytes())

    def target_matrix(self) -> np.ndarray:
        """The 2x2 operator a (controlled) single-qubit gate applies."""
        name = self.name
        if name == "H":
            return HADAMARD
        if name == "X" or name == "CNOT":
            return SIGMA_X
        if name == "Y":
            return SIGMA_Y
        if name == "Z":
            return SIGMA_Z
        if name == "RX":
            return _rotation(SIGMA_X, self.params[0])
        if name == "RY":
            return _rotation(SIGMA_Y, self.params[0])
        if name == "RZ":
            return _rotation(SIGMA_Z, self.params[0])
        if name in ("PHASE", "CPHASE"):
            return _phase(self.params[0])
        if name == "CU":
            return self.unitary
        raise ValueError(f"{name} has no single-qubit target operator")


def gate_matrix(spec: GateSpec) -> np.ndarray:
    """Base matrix of a gate on its own ``arity`` qubits (first qubit most significant)."""
    if spec.arity == 1:
        return spec.target_matrix().copy()
    if spec.name == "SWAP":
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    return _expand(spec, tuple(range(spec.arity)), spec.arity).toarray()


def _embed(ops: dict, n: int):
    """Kronecker product over ``n`` qubits with ``ops[q]`` on qubit q, identity elsewhere."""
    out = sp.identity(1, dtype=complex, format="csr")
    run = 0
    for q in range(n):
        if q in ops:
            if run:
                out = sp.kron(out, sp.identity(1 << run, dtype=complex), format="csr")
                run = 0
            out = sp.kron(out, sp.csr_matrix(ops[q]), format="csr")
        else:
            run += 1
    if run:
        out = sp.kron(out, sp.identity(1 << run, dtype=complex), format="csr")
    return out


def _controlled(control, target, u, n):
    return _embed({control: P0}, n) + _embed({control: P1, target: u}, n)


def _expand(spec: GateSpec, targets: tuple, n: int):
    name = spec.name
    if name in ("CNOT", "CPHASE", "CU"):
        j, k = targets
        return _controlled(j, k, spec.target_matrix(), n).tocsr()
    if name == "SWAP":
        j, k = targets
        cnot_jk = _controlled(j, k, SIGMA_X, n)
        cnot_kj = _controlled(k, j, SIGMA_X, n)
        return (cnot_kj @ cnot_jk @ cnot_kj).tocsr()
    if name == "TOFFOLI":
        i, j, k = targets
        out = (_embed({i: P0, j: P0}, n) + _embed({i: P0, j: P1}, n)
               + _embed({i: P1, j: P0}, n) + _embed({i: P1, j: P1, k: SIGMA_X}, n))
        return out.tocsr()
    (t,) = targets
    return _embed({t: spec.target_matrix()}, n)


class ExpandedOperator:
    """An expanded ``2^N x 2^N`` gate in CSR form.

    Gates whose operator has exactly one nonzero per row (CNOT, SWAP,
    TOFFOLI, X, Z, phases, ...) are applied as a gather:
    ``(U rho U^dagger)[i, j] = u_i conj(u_j) rho[c_i, c_j]``.
    """

    __slots__ = ("matrix", "columns", "phases")

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix)
        m.eliminate_zeros()
        m.sort_indices()
        self.matrix = m
        if np.all(np.diff(m.indptr) == 1):
            self.columns = m.indices.copy()
            self.phases = m.data.copy()
        else:
            self.columns = self.phases = None

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, state) -> None:
        rho = state.matrix
        if self.matrix.shape != rho.shape:
            raise ShapeError(f"operator shape {self.matrix.shape} does not match state shape {rho.shape}")
        if self.columns is None:
            apply_unitary(state, self.matrix)
            return
        c = self.columns
        rho[...] = rho[np.ix_(c, c)] * np.outer(self.phases, self.phases.conj())


class OperatorCache:
    """Thread-safe map from (gate, params, targets, N) to an expanded operator.

    ``maxsize=None`` never evicts; otherwise least-recently-used entries go
    first. A disabled cache rebuilds every operator.
    """

    def __init__(self, maxsize: int | None = None, enabled: bool = True):
        self.maxsize = maxsize
        self.enabled = enabled
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def get(self, spec: GateSpec, targets: tuple, n: int) -> ExpandedOperator:
        if not self.enabled:
            return ExpandedOperator(_expand(spec, targets, n))
        key = (spec.fingerprint(), targets, n)
        with self._lock:
            op = self._data.get(key)
            if op is not None:
                self._data.move_to_end(key)
                self.hits += 1
                return op
            self.misses += 1
        # Built outside the lock; a concurrent duplicate build stores an identical value.
        op = ExpandedOperator(_expand(spec, targets, n))
        with self._lock:
            self._data[key] = op
            if self.maxsize is not None:
                while len(self._data) > self.maxsize:
                    self._data.popitem(last=False)
        return op


default_cache = OperatorCache()


def _check_targets(spec, targets, n):
    targets = tuple(int(t) for t in targets)
    if len(targets) != spec.arity:
        raise ValueError(f"{spec.name} acts on {spec.arity} qubit(s), got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise IndexError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise IndexError(f"target qubit {t} out of range for {n} qubits")
    return targets


def expand_operator(spec: GateSpec, targets, n: int, cache: OperatorCache | None = None) -> np.ndarray:
    """Dense ``2^n x 2^n`` operator of ``spec`` acting on ``targets``."""
    targets = _check_targets(spec, targets, n)
    cache = default_cache if cache is None else cache
    return cache.get(spec, targets, n).toarray()


def apply_gate(spec: GateSpec, qubits, cache: OperatorCache | None = None) -> None:
    """Apply ``spec`` to one to three qubits of the same system."""
    qubits = tuple(qubits)
    first = qubits[0]
    for q in qubits[1:]:
        if (q.stream_id, q.system_index) != (first.stream_id, first.system_index):
            raise CrossSystemError("gate qubits must belong to the same quantum system")
    state = first.system
    targets = _check_targets(spec, [q.qubit_index for q in qubits], state.n_qubits)
    cache = default_cache if cache is None else cache
    cache.get(spec, targets, state.n_qubits).apply(state)


def apply_single_qubit_unitary(qubit, u) -> None:
    """Apply an arbitrary 2x2 unitary to ``qubit``; bypasses the cache."""
    state = qubit.system
    apply_unitary(state, _embed({qubit.qubit_index: np.asarray(u, dtype=complex)}, state.n_qubits))


def H(qubit):
    """Hadamard gate."""
    apply_gate(GateSpec("H"), (qubit,))


def X(qubit):
    """Pauli-X gate."""
    apply_gate(GateSpec("X"), (qubit,))


def Y(qubit):
    apply_gate(GateSpec("Y"), (qubit,))


def Z(qubit):
    apply_gate(GateSpec("Z"), (qubit,))


def RX(qubit, angle):
    """Rotation by ``angle`` radians about the x axis."""
    apply_gate(GateSpec("RX", (angle,)), (qubit,))


def RY(qubit, angle):
    apply_gate(GateSpec("RY", (angle,)), (qubit,))


def RZ(qubit, angle):
    apply_gate(GateSpec("RZ", (angle,)), (qubit,))


def PHASE(qubit, angle):
    """Phase shift ``diag(1, exp(i*angle))``."""
    apply_gate(GateSpec("PHASE", (angle,)), (qubit,))


def CNOT(control, target):
    apply_gate(GateSpec("CNOT"), (control, target))


def CPHASE(control, target, angle):
    """Controlled phase shift; acts as ``PHASE(target, angle)`` when control is 1."""
    apply_gate(GateSpec("CPHASE", (angle,)), (control, target))


def CU(control, target, unitary):
    """Controlled arbitrary single-qubit unitary."""
    apply_gate(GateSpec("CU", unitary=unitary), (control, target))


def SWAP(qubit1, qubit2):
    apply_gate(GateSpec("SWAP"), (qubit1, qubit2))


def TOFFOLI(control1, control2, target):
    apply_gate(GateSpec("TOFFOLI"), (control1, control2, target))


TOFOLLI = TOFFOLI  # alternate spelling, kept as an alias


def build_qft(qubits) -> None:
    """Quantum Fourier transform over ``qubits`` using H and controlled phases.

    No final swap network is applied: the coefficient of output basis state
    ``k`` ends up on the bit-reversed register, i.e. ``qubits[0]`` carries the
    most significant output bit's partner ``y_{N-1}`` and ``qubits[-1]``
    carries ``y_0``. Equivalently the circuit's unitary is ``R @ F`` with
    ``F`` the DFT matrix (``F[k, m] = exp(2*pi*i*k*m / 2^N) / sqrt(2^N)``)
    and ``R`` the bit-reversal permutation of the register.
    """
    qubits = list(qubits)
    n = len(qubits)
    for j in range(n):
        H(qubits[j])
        for m in range(2, n - j + 1):
            CPHASE(qubits[j + m - 1], qubits[j], 2 * np.pi / 2**m)
