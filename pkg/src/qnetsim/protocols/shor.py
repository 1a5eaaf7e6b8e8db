"""Nine-qubit Shor code and the protected/unprotected transmission demo."""

from __future__ import annotations

import numpy as np

from ..agents import Agent
from ..channels import GroupCorruption
from ..gates import CNOT, TOFFOLI, H, X
from ..qstate import DensityState
from ..qstream import new_stream
from ..simulation import Simulation
from .common import ProtocolReport, as_bitstream

HEADS = (0, 3, 6)


def _qubits(target):
    qubits = list(target.qubits) if isinstance(target, DensityState) else list(target)
    if len(qubits) != 9:
        raise ValueError(f"the Shor code needs 9 qubits, got {len(qubits)}")
    return qubits


def shor_encode(target) -> None:
    """Encode qubit 0 into nine qubits; qubits 1..8 must start in ``|0>``."""
    q = _qubits(target)
    CNOT(q[0], q[3])
    CNOT(q[0], q[6])
    for h in HEADS:
        H(q[h])
    for h in HEADS:
        CNOT(q[h], q[h + 1])
        CNOT(q[h], q[h + 2])


def shor_decode(target) -> None:
    """Undo :func:`shor_encode`, correcting one arbitrary single-qubit error.

    The recovered logical state ends up on qubit 0.
    """
    q = _qubits(target)
    for h in HEADS:
        CNOT(q[h], q[h + 1])
        CNOT(q[h], q[h + 2])
        TOFFOLI(q[h + 1], q[h + 2], q[h])
    for h in HEADS:
        H(q[h])
    CNOT(q[0], q[3])
    CNOT(q[0], q[6])
    TOFFOLI(q[3], q[6], q[0])


class ShorAlice(Agent):
    def __init__(self, qstream, out=None, bits=(), name="Alice", to="Bob", encode=True, **kwargs):
        super().__init__(qstream, out, name=name, **kwargs)
        self.bits = list(bits)
        self.to = to
        self.encode = encode

    def run(self):
        for qsys, bit in zip(self.qstream, self.bits):
            q = qsys.qubits
            if bit:
                X(q[0])
            if self.encode:
                shor_encode(q)
            for qubit in q:
                self.qsend(self.to, qubit)


class ShorBob(Agent):
    def __init__(self, qstream, out=None, name="Bob", sender="Alice", decode=True, **kwargs):
        super().__init__(qstream, out, name=name, **kwargs)
        self.sender = sender
        self.decode = decode

    def run(self):
        received = []
        for _ in self.qstream:
            q = [self.qrecv(self.sender) for _ in range(9)]
            if self.decode:
                shor_decode(q)
            received.append(self.measure(q[0]))
        self.output(received)


def DumbAlice(qstream, out=None, bits=(), **kwargs):
    return ShorAlice(qstream, out, bits, name="DumbAlice", to="DumbBob", encode=False, **kwargs)


def DumbBob(qstream, out=None, **kwargs):
    return ShorBob(qstream, out, name="DumbBob", sender="DumbAlice", decode=False, **kwargs)


def run_shor_demo(message, seed=None, p_error=1.0, sampler=None, precision="double",
                  pulse_length=1e-9, progress=False):
    """Send ``message`` bit by bit, once Shor-encoded and once bare.

    Every group of nine physical qubits passes a channel that corrupts one
    of them with a random unitary (with probability ``p_error``).
    ``sampler(rng) -> 2x2 unitary`` overrides the Haar sampler.

    Returns ``(protected, unprotected, report)``; ``report.counters``
    holds the corruption records of both channels.
    """
    bits = as_bitstream(message)
    n = len(bits)
    out = Agent.shared_output()
    coded = new_stream(9, n, precision)
    bare = new_stream(9, n, precision)
    alice = ShorAlice(coded, out, bits.bits, pulse_length=pulse_length)
    bob = ShorBob(coded, out, pulse_length=pulse_length)
    dumb_alice = DumbAlice(bare, out, bits.bits, pulse_length=pulse_length)
    dumb_bob = DumbBob(bare, out, pulse_length=pulse_length)

    def model():
        return GroupCorruption(p_error, 9, sampler=sampler)

    alice.qconnect(bob, model)
    dumb_alice.qconnect(dumb_bob, model)
    agents = [alice, bob, dumb_alice, dumb_bob]
    Simulation(*agents, seed=seed, progress=progress).run()
    protected = np.asarray(out["Bob"], dtype=np.uint8)
    unprotected = np.asarray(out["DumbBob"], dtype=np.uint8)
    coded_records = alice.qchannels_out["Bob"].error_model.records
    bare_records = dumb_alice.qchannels_out["DumbBob"].error_model.records
    report = ProtocolReport.from_agents(
        agents, out,
        protected_errors=int(np.count_nonzero(protected != bits.bits)),
        unprotected_errors=int(np.count_nonzero(unprotected != bits.bits)),
        corrupted_groups={"Alice->Bob": len(coded_records), "DumbAlice->DumbBob": len(bare_records)},
        corruption_records={
            "Alice->Bob": [(g, i, u) for g, i, u in coded_records],
            "DumbAlice->DumbBob": [(g, i, u) for g, i, u in bare_records],
        },
    )
    return protected, unprotected, report
