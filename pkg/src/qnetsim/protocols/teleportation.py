"""Two-party teleportation of ``RX(theta)|0>`` over an ensemble of 3-qubit systems.

Qubit layout per system: 0 is the state to teleport, 1 is Alice's half of
the Bell pair, 2 is Bob's half.
"""

from __future__ import annotations

import numpy as np

from ..agents import Agent
from ..gates import CNOT, RX, H, X, Z
from ..qstream import new_stream
from ..rng import derive_rng
from ..simulation import Simulation
from .common import ProtocolReport


class TeleportAlice(Agent):
    def __init__(self, qstream, out=None, theta=0.0, **kwargs):
        super().__init__(qstream, out, name="Alice", **kwargs)
        self.theta = theta

    def run(self):
        for qsys in self.qstream:
            psi, a, b = qsys.qubits
            RX(psi, self.theta)
            H(a)
            CNOT(a, b)
            self.qsend("Bob", b)
            CNOT(psi, a)
            H(psi)
            self.csend("Bob", (self.measure(psi), self.measure(a)))


class TeleportBob(Agent):
    def __init__(self, qstream, out=None, **kwargs):
        super().__init__(qstream, out, name="Bob", **kwargs)

    def run(self):
        results = []
        for _ in self.qstream:
            b = self.qrecv("Alice")
            psi_bit, a_bit = self.crecv("Alice")
            if a_bit:
                X(b)
            if psi_bit:
                Z(b)
            results.append(self.measure(b))
        self.output(results)


def default_angles(points=9):
    return np.linspace(0.0, 2 * np.pi, points)


def run_teleportation(angles=None, ensemble=250, seed=None, precision="double",
                      length_km=0.0, pulse_length=1e-9, progress=False):
    """Teleport ``RX(theta)|0>`` ``ensemble`` times for each angle.

    Returns ``(fractions, report)`` where ``fractions[i]`` is the observed
    fraction of 1 outcomes for ``angles[i]``; the expected value is
    ``sin(theta/2)**2``.
    """
    if ensemble < 1:
        raise ValueError("ensemble must be at least 1")
    angles = default_angles() if angles is None else np.asarray(angles, dtype=float)
    fractions = []
    clocks = []
    for i, theta in enumerate(angles):
        stream = new_stream(3, ensemble, precision)
        out = Agent.shared_output()
        alice = TeleportAlice(stream, out, theta, pulse_length=pulse_length)
        bob = TeleportBob(stream, out, pulse_length=pulse_length)
        alice.qconnect(bob, length=length_km)
        alice.cconnect(bob, length=length_km)
        sub_seed = None if seed is None else int(derive_rng(seed, "teleportation", i).integers(2**63))
        Simulation(alice, bob, seed=sub_seed, progress=progress).run()
        fractions.append(float(np.mean(out["Bob"])))
        clocks.append({"Alice": alice.clock, "Bob": bob.clock})
    report = ProtocolReport(
        outputs={"fractions": fractions},
        clocks={"per_angle": clocks},
        counters={"angles": len(angles), "ensemble": ensemble},
    )
    return np.array(fractions), report
