"""Three-party superdense coding, and the same protocol with an eavesdropper.

Charlie sits at the midpoint and hands out Bell pairs; Alice encodes two
classical bits per pair in her half and forwards it to Bob, who decodes
with CNOT then H. A lost qubit on any hop is decoded as ``(0, 0)``.

In the interception variant Eve sits on the Alice-Bob link, measures every
qubit in the computational basis and forwards the collapsed qubit.
"""

from __future__ import annotations

import numpy as np

from ..agents import Agent
from ..channels import SPEED_OF_LIGHT_KM_S, Attenuation
from ..gates import CNOT, H, X, Z
from ..qstream import new_stream
from ..simulation import Simulation
from .common import ProtocolReport, as_bitstream, link_counters


class Charlie(Agent):
    def __init__(self, qstream, out=None, **kwargs):
        super().__init__(qstream, out, name="Charlie", **kwargs)

    def run(self):
        for qsys in self.qstream:
            a, b = qsys.qubits
            H(a)
            CNOT(a, b)
            self.qsend("Alice", a)
            self.qsend("Bob", b)


class DenseAlice(Agent):
    def __init__(self, qstream, out=None, pairs=(), to="Bob", **kwargs):
        super().__init__(qstream, out, name="Alice", **kwargs)
        self.pairs = np.asarray(pairs, dtype=np.uint8).reshape(-1, 2)
        self.to = to

    def run(self):
        for _, (b1, b2) in zip(self.qstream, self.pairs):
            q = self.qrecv("Charlie")
            if q is not None:
                if b2:
                    X(q)
                if b1:
                    Z(q)
            self.qsend(self.to, q)


class DenseBob(Agent):
    def __init__(self, qstream, out=None, sender="Alice", **kwargs):
        super().__init__(qstream, out, name="Bob", **kwargs)
        self.sender = sender

    def run(self):
        received = []
        for _ in self.qstream:
            qa = self.qrecv(self.sender)
            qc = self.qrecv("Charlie")
            if qa is None or qc is None:
                received.extend((0, 0))
                continue
            CNOT(qa, qc)
            H(qa)
            received.extend((self.measure(qa), self.measure(qc)))
        self.output(received)


class Eve(Agent):
    def __init__(self, qstream, out=None, **kwargs):
        super().__init__(qstream, out, name="Eve", **kwargs)

    def run(self):
        stolen = []
        for _ in self.qstream:
            q = self.qrecv("Alice")
            stolen.append(self.measure(q) if q is not None else 0)
            self.qsend("Bob", q)
        self.output(stolen)


def _fiber(alpha):
    return (lambda: Attenuation(alpha)) if alpha > 0 else None


def _network(data, length_km, alpha, pulse_length, precision, eavesdrop, error_model, signal_speed, capacity):
    bits = as_bitstream(data)
    pairs = bits.pairs()
    stream = new_stream(2, len(pairs), precision)
    out = Agent.shared_output()
    charlie = Charlie(stream, out, pulse_length=pulse_length)
    alice = DenseAlice(stream, out, pairs, to="Eve" if eavesdrop else "Bob", pulse_length=pulse_length)
    bob = DenseBob(stream, out, sender="Eve" if eavesdrop else "Alice", pulse_length=pulse_length)
    model = error_model if error_model is not None else _fiber(alpha)
    charlie.qconnect(alice, model, length_km / 2, signal_speed, capacity)
    charlie.qconnect(bob, model, length_km / 2, signal_speed, capacity)
    agents = [charlie, alice, bob]
    if eavesdrop:
        eve = Eve(stream, out, pulse_length=pulse_length)
        alice.qconnect(eve, model, length_km / 2, signal_speed, capacity)
        eve.qconnect(bob, model, length_km / 2, signal_speed, capacity)
        agents.append(eve)
    else:
        alice.qconnect(bob, model, length_km, signal_speed, capacity)
    return bits, agents, out


def run_superdense(data, length_km=1.0, alpha_db_per_km=0.16, seed=None, pulse_length=1e-9,
                   precision="double", progress=False, error_model=None,
                   signal_speed=SPEED_OF_LIGHT_KM_S, capacity=None):
    """Send ``data`` two bits per Bell pair; returns ``(received_bits, report)``.

    Every quantum link is fiber with ``alpha_db_per_km`` loss unless
    ``error_model`` (an :class:`ErrorModel` class or factory) is given.
    """
    bits, agents, out = _network(data, length_km, alpha_db_per_km, pulse_length, precision, False,
                                 error_model, signal_speed, capacity)
    Simulation(*agents, seed=seed, progress=progress).run()
    received = np.asarray(out["Bob"], dtype=np.uint8)
    links = link_counters(agents)
    report = ProtocolReport.from_agents(
        agents, out,
        links=links,
        lost_qubits=sum(v["lost"] for v in links.values()),
        bit_errors=int(np.count_nonzero(received != bits.bits)),
        pairs=len(bits) // 2,
    )
    return received, report


def run_interception(data, seed=None, length_km=0.0, alpha_db_per_km=0.0, pulse_length=1e-9,
                     precision="double", progress=False, error_model=None,
                     signal_speed=SPEED_OF_LIGHT_KM_S, capacity=None):
    """Superdense coding with Eve measuring Alice's qubits in transit.

    Returns ``(eve_bits, bob_bits, report)``; Eve has one bit per pair.
    """
    bits, agents, out = _network(data, length_km, alpha_db_per_km, pulse_length, precision, True,
                                 error_model, signal_speed, capacity)
    Simulation(*agents, seed=seed, progress=progress).run()
    bob = np.asarray(out["Bob"], dtype=np.uint8)
    eve = np.asarray(out["Eve"], dtype=np.uint8)
    links = link_counters(agents)
    report = ProtocolReport.from_agents(
        agents, out,
        links=links,
        lost_qubits=sum(v["lost"] for v in links.values()),
        bit_errors=int(np.count_nonzero(bob != bits.bits)),
        pairs=len(bits) // 2,
    )
    return eve, bob, report
