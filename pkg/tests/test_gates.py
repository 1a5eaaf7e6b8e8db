import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnetsim import gates
from qnetsim.errors import CrossSystemError
from qnetsim.gates import (
    CNOT, CPHASE, CU, H, PHASE, RX, RY, RZ, SWAP, TOFFOLI, X, Y, Z, GateSpec, OperatorCache,
    build_qft, expand_operator, gate_matrix,
)
from qnetsim.qstate import from_matrix, new_system

from harness import align_phase, circuit_unitary
from oracles import (
    bit_reversal, cnot_oracle, controlled_oracle, dft_matrix, random_density_matrix,
    single_qubit_operator, swap_oracle, toffoli_oracle,
)

s2 = np.sqrt(2)
I2 = np.eye(2)

# Reference matrices written out by hand from the gate definitions.
FROZEN = {
    "H": np.array([[1, 1], [1, -1]]) / s2,
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]]),
}


def rx(t):
    return np.array([[np.cos(t / 2), -1j * np.sin(t / 2)], [-1j * np.sin(t / 2), np.cos(t / 2)]])


def ry(t):
    return np.array([[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]])


def rz(t):
    return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)])


def phase(t):
    return np.diag([1, np.exp(1j * t)])


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_fixed_single_qubit_matrices(name):
    np.testing.assert_allclose(gate_matrix(GateSpec(name)), FROZEN[name], atol=1e-15)


@pytest.mark.parametrize("name,ref", [("RX", rx), ("RY", ry), ("RZ", rz), ("PHASE", phase)])
@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, np.pi, 4.0])
def test_parametrised_matrices(name, ref, theta):
    np.testing.assert_allclose(gate_matrix(GateSpec(name, (theta,))), ref(theta), atol=1e-15)


def test_cnot_two_qubit_matrix():
    expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(expand_operator(GateSpec("CNOT"), (0, 1), 2), expected)


def test_cnot_reversed_targets():
    expected = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
    np.testing.assert_array_equal(expand_operator(GateSpec("CNOT"), (1, 0), 2), expected)


def test_swap_matrix_and_cnot_identity():
    swap = expand_operator(GateSpec("SWAP"), (0, 1), 2)
    np.testing.assert_array_equal(swap, np.eye(4)[[0, 2, 1, 3]])
    c01 = expand_operator(GateSpec("CNOT"), (0, 1), 2)
    c10 = expand_operator(GateSpec("CNOT"), (1, 0), 2)
    np.testing.assert_array_equal(swap, c10 @ c01 @ c10)


def test_toffoli_truth_table():
    for bits in itertools.product((0, 1), repeat=3):
        s = new_system(3)
        for q, b in zip(s.qubits, bits):
            if b:
                X(q)
        TOFFOLI(*s.qubits)
        expected = list(bits)
        expected[2] ^= bits[0] & bits[1]
        idx = int("".join(map(str, expected)), 2)
        assert s.matrix[idx, idx] == pytest.approx(1)


def test_toffoli_misspelling_accepted():
    assert GateSpec("TOFOLLI").name == "TOFFOLI"
    assert gates.TOFOLLI is gates.TOFFOLI


def test_cphase_is_controlled_phase():
    theta = 0.7
    np.testing.assert_allclose(expand_operator(GateSpec("CPHASE", (theta,)), (0, 1), 2),
                               np.diag([1, 1, 1, np.exp(1j * theta)]), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_single_qubit_padding_matches_oracle(n, rng):
    for target in range(n):
        theta = rng.uniform(0, 2 * np.pi)
        spec = GateSpec("RY", (theta,))
        np.testing.assert_allclose(expand_operator(spec, (target,), n),
                                   single_qubit_operator(ry(theta), target, n), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_two_qubit_padding_matches_oracle(n):
    for c, t in itertools.permutations(range(n), 2):
        np.testing.assert_array_equal(expand_operator(GateSpec("CNOT"), (c, t), n), cnot_oracle(c, t, n))
        np.testing.assert_array_equal(expand_operator(GateSpec("SWAP"), (c, t), n), swap_oracle(c, t, n))
        u = rx(0.4)
        np.testing.assert_allclose(expand_operator(GateSpec("CU", unitary=u), (c, t), n),
                                   controlled_oracle(c, t, u, n), atol=1e-15)


@pytest.mark.parametrize("n", [3, 4])
def test_toffoli_padding_matches_oracle(n):
    for c1, c2, t in itertools.permutations(range(n), 3):
        np.testing.assert_array_equal(expand_operator(GateSpec("TOFFOLI"), (c1, c2, t), n),
                                      toffoli_oracle(c1, c2, t, n))


@pytest.mark.parametrize("name,params", [("H", ()), ("RX", (1.3,)), ("CNOT", ()), ("CPHASE", (0.2,)),
                                         ("SWAP", ()), ("TOFFOLI", ())])
def test_expanded_operators_are_unitary(name, params):
    spec = GateSpec(name, params)
    u = expand_operator(spec, tuple(range(spec.arity)), 4)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(16), atol=1e-13)


def test_gate_validation():
    with pytest.raises(ValueError):
        GateSpec("NOPE")
    with pytest.raises(ValueError):
        GateSpec("RX")
    with pytest.raises(ValueError):
        GateSpec("CU", unitary=np.ones((2, 2)))
    with pytest.raises(IndexError):
        expand_operator(GateSpec("CNOT"), (1, 1), 2)
    with pytest.raises(IndexError):
        expand_operator(GateSpec("H"), (3,), 2)


def test_cross_system_gate_rejected():
    a = new_system(1)
    b = new_system(1)
    with pytest.raises(CrossSystemError):
        CNOT(a.qubit(0), b.qubit(0))


def test_cache_hits_and_lru_eviction():
    cache = OperatorCache(maxsize=2)
    cache.get(GateSpec("H"), (0,), 2)
    cache.get(GateSpec("H"), (0,), 2)
    assert cache.hits == 1 and cache.misses == 1
    cache.get(GateSpec("X"), (0,), 2)
    cache.get(GateSpec("Z"), (0,), 2)
    assert len(cache) == 2
    assert (GateSpec("H").fingerprint(), (0,), 2) not in cache


def test_cache_key_rounds_angles():
    a = GateSpec("RX", (0.1 + 1e-15,))
    b = GateSpec("RX", (0.1,))
    assert a.fingerprint() == b.fingerprint()
    assert GateSpec("RX", (0.1001,)).fingerprint() != b.fingerprint()


def _random_program(rng, n, length):
    names = ["H", "X", "Y", "Z", "RX", "RY", "RZ", "PHASE", "CNOT", "CPHASE", "SWAP", "TOFFOLI", "CU"]
    prog = []
    for _ in range(length):
        name = names[rng.integers(len(names))]
        spec_arity = gates.ARITY[name]
        if spec_arity > n:
            continue
        params = (rng.uniform(0, 2 * np.pi),) if name in ("RX", "RY", "RZ", "PHASE", "CPHASE") else ()
        unitary = rx(rng.uniform(0, 6)) if name == "CU" else None
        targets = tuple(rng.choice(n, spec_arity, replace=False))
        prog.append((GateSpec(name, params, unitary), targets))
    return prog


def test_cache_is_transparent(rng):
    """Cached, uncached and small-LRU runs of the same circuits agree exactly."""
    for trial in range(100):
        n = int(rng.integers(1, 5))
        rho = random_density_matrix(n, rng)
        prog = _random_program(rng, n, 12)
        results = []
        for cache in (OperatorCache(), OperatorCache(enabled=False), OperatorCache(maxsize=1)):
            s = from_matrix(rho)
            for spec, targets in prog:
                gates.apply_gate(spec, [s.qubit(t) for t in targets], cache)
            results.append(s.copy())
        np.testing.assert_allclose(results[1], results[0], atol=1e-12)
        np.testing.assert_allclose(results[2], results[0], atol=1e-12)


def test_gates_match_dense_oracle_on_random_states(rng):
    n = 3
    rho = random_density_matrix(n, rng)
    s = from_matrix(rho)
    expected = rho.copy()
    steps = [
        (lambda: H(s.qubit(1)), single_qubit_operator(FROZEN["H"], 1, n)),
        (lambda: CNOT(s.qubit(2), s.qubit(0)), cnot_oracle(2, 0, n)),
        (lambda: RZ(s.qubit(0), 0.9), single_qubit_operator(rz(0.9), 0, n)),
        (lambda: TOFFOLI(s.qubit(2), s.qubit(0), s.qubit(1)), toffoli_oracle(2, 0, 1, n)),
        (lambda: CPHASE(s.qubit(1), s.qubit(2), 1.1), controlled_oracle(1, 2, phase(1.1), n)),
        (lambda: SWAP(s.qubit(0), s.qubit(2)), swap_oracle(0, 2, n)),
        (lambda: Y(s.qubit(2)), single_qubit_operator(FROZEN["Y"], 2, n)),
        (lambda: RX(s.qubit(1), 2.2), single_qubit_operator(rx(2.2), 1, n)),
        (lambda: PHASE(s.qubit(0), 0.4), single_qubit_operator(phase(0.4), 0, n)),
        (lambda: CU(s.qubit(0), s.qubit(1), ry(0.8)), controlled_oracle(0, 1, ry(0.8), n)),
        (lambda: Z(s.qubit(1)), single_qubit_operator(FROZEN["Z"], 1, n)),
    ]
    for act, u in steps:
        act()
        expected = u @ expected @ u.conj().T
        np.testing.assert_allclose(s.matrix, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_qft_matches_dft(n):
    u = circuit_unitary(n, lambda s: build_qft(s.qubits))
    expected = dft_matrix(n)[bit_reversal(n)]
    np.testing.assert_allclose(align_phase(u, expected), expected, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_gates_preserve_physicality(seed, n):
    rng = np.random.default_rng(seed)
    s = from_matrix(random_density_matrix(n, rng))
    for spec, targets in _random_program(rng, n, 8):
        gates.apply_gate(spec, [s.qubit(t) for t in targets])
    m = s.matrix
    assert abs(np.trace(m).real - 1) < 1e-9
    assert np.max(np.abs(m - m.conj().T)) < 1e-9
    assert np.linalg.eigvalsh(m).min() > -1e-9
