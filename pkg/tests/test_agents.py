from fractions import Fraction

import numpy as np
import pytest

from qnetsim.agents import Agent, HolderRegistry, OutputSink, cconnect, qconnect
from qnetsim.channels import SPEED_OF_LIGHT_KM_S, Attenuation, Conduit
from qnetsim.errors import ConfigurationError, HolderViolation, RoutingError, SimulationError, UsageError
from qnetsim.gates import CNOT, H, X
from qnetsim.qstream import new_stream
from qnetsim.simulation import Simulation


class Sender(Agent):
    def __init__(self, stream, out=None, to="Bob", **kw):
        super().__init__(stream, out, name=kw.pop("name", "Alice"), **kw)
        self.to = to

    def run(self):
        for qsys in self.qstream:
            self.qsend(self.to, qsys.qubit(0))


class Receiver(Agent):
    def __init__(self, stream, out=None, sender="Alice", **kw):
        super().__init__(stream, out, name=kw.pop("name", "Bob"), **kw)
        self.sender = sender
        self.arrivals = []

    def run(self):
        got = []
        for _ in self.qstream:
            q = self.qrecv(self.sender)
            self.arrivals.append(self.exact_clock)
            got.append(None if q is None else self.measure(q))
        self.output(got)


def test_sender_clock_counts_pulses_exactly():
    stream = new_stream(1, 1000)
    a, b = Sender(stream), Receiver(stream)
    a.qconnect(b, length=1.0)
    Simulation(a, b, seed=0).run()
    assert a.exact_clock == Fraction(1, 10**6)
    assert a.clock == 1e-6


def test_receiver_clock_respects_flight_time():
    stream = new_stream(1, 10)
    a, b = Sender(stream), Receiver(stream)
    a.qconnect(b, length=2.0)
    Simulation(a, b, seed=0).run()
    delay = Fraction(2) / Fraction(repr(SPEED_OF_LIGHT_KM_S))
    for i, t in enumerate(b.arrivals, start=1):
        assert t == i * Fraction(1, 10**9) + delay
    assert b.exact_clock == b.arrivals[-1]


def test_receiver_clock_never_moves_backwards():
    class LateReceiver(Receiver):
        def run(self):
            self._set_clock(Fraction(1))
            super().run()

    stream = new_stream(1, 3)
    a, b = Sender(stream), LateReceiver(stream)
    a.qconnect(b)
    Simulation(a, b).run()
    assert b.arrivals == [Fraction(1)] * 3


def test_classical_metering_modes():
    class Talker(Agent):
        def run(self):
            self.csend("Listener", [1, 0, 1, 1])

    class Listener(Agent):
        def run(self):
            self.output(self.crecv("Talker"))

    for mode, pulses in (("message", 1), ("bit", 4)):
        out = OutputSink()
        t, l = Talker(None, out, classical_metering=mode), Listener(None, out)
        t.cconnect(l)
        Simulation(t, l).run()
        assert t.exact_clock == pulses * Fraction(1, 10**9)
        assert out["Listener"] == [1, 0, 1, 1]

    with pytest.raises(ValueError):
        Agent(classical_metering="byte")


def test_default_name_and_repr():
    class Node(Agent):
        pass

    n = Node()
    assert n.name == "Node"
    assert "Node" in repr(n)
    with pytest.raises(NotImplementedError):
        n.run()


def test_connect_errors():
    a, b = Agent(name="A"), Agent(name="B")
    with pytest.raises(ConfigurationError):
        a.qconnect(a)
    a.qconnect(b)
    with pytest.raises(ConfigurationError):
        b.qconnect(a)
    a.cconnect(b)
    with pytest.raises(ConfigurationError):
        cconnect(b, a)
    assert set(a.endpoints) == {"B"}
    assert isinstance(a.endpoints["B"]["quantum_out"], Conduit)
    assert len(a.conduits()) == 4


def test_routing_error_for_unknown_peer():
    a = Agent(name="A")
    with pytest.raises(RoutingError):
        a.qsend("Nobody", None)
    with pytest.raises(RoutingError):
        a.crecv("Nobody")


def test_error_model_instances_are_copied_per_direction():
    a, b = Agent(name="A"), Agent(name="B")
    model = Attenuation(0.3)
    qconnect(a, b, model, 2.0)
    fwd, back = a.qchannels_out["B"].error_model, b.qchannels_out["A"].error_model
    assert fwd is model and back is not model
    assert back.alpha_db_per_km == 0.3
    assert a.qchannels_out["B"].length_km == 2.0


def test_error_model_factory_builds_one_per_direction():
    a, b = Agent(name="A"), Agent(name="B")
    a.qconnect(b, lambda: Attenuation(0.5))
    assert a.qchannels_out["B"].error_model is not b.qchannels_out["A"].error_model


def test_output_once():
    out = OutputSink()
    a = Agent(None, out, name="A")
    a.output(1)
    with pytest.raises(UsageError):
        a.publish(2)
    with pytest.raises(UsageError):
        Agent(name="B").output(1)


def test_quantum_memory_round_trip():
    a = Agent(name="A")
    q1, q2 = new_stream(2, 1)[0].qubits
    a.qstore(q1)
    a.qstore(q2)
    assert a.qretrieve() == q1
    assert a.qretrieve(0) == q2


def test_holder_registry():
    reg = HolderRegistry()
    q = new_stream(1, 1)[0].qubit(0)
    reg.release(q, "A", "A->B")
    reg.acquire(q, "B")
    assert reg.holder(q) == "B"
    with pytest.raises(HolderViolation):
        reg.release(q, "A", "A->B")


def test_simulation_rejects_unknown_peer():
    a, b = Agent(name="A"), Agent(name="B")
    a.qconnect(b)
    with pytest.raises(ConfigurationError):
        Simulation(a).run()
    with pytest.raises(ConfigurationError):
        Simulation(a, b, Agent(name="A")).run()


def test_debug_mode_holder_violation_propagates():
    stream = new_stream(1, 1)
    q = stream[0].qubit(0)

    class First(Agent):
        def run(self):
            self.qsend("Second", q)
            self.csend("Second", "done")

    class Second(Agent):
        def run(self):
            self.qrecv("First")
            self.crecv("First")
            self.output("ok")
            self.csend("Third", "go")

    class Third(Agent):
        def run(self):
            self.crecv("Second")
            self.qsend("Second", q)

    f, s, t = First(name="First"), Second(name="Second"), Third(name="Third")
    f.qconnect(s)
    f.cconnect(s)
    s.cconnect(t)
    t.qconnect(s)
    with pytest.raises(SimulationError) as info:
        Simulation(f, s, t, debug=True).run()
    assert info.value.agent == "Third"
    assert isinstance(info.value.__cause__, HolderViolation)


def test_lost_qubits_arrive_as_none():
    stream = new_stream(1, 20)
    a, b = Sender(stream), Receiver(stream)
    a.qconnect(b, lambda: Attenuation(1e6), length=1.0)
    out = Simulation(a, b, seed=1).run()
    assert out["Bob"] == [None] * 20
    assert a.qchannels_out["Bob"].lost == 20


def test_entanglement_survives_transfer():
    stream = new_stream(2, 200)

    class Source(Agent):
        def run(self):
            for qsys in self.qstream:
                a, b = qsys.qubits
                H(a)
                CNOT(a, b)
                self.qsend("Left", a)
                self.qsend("Right", b)

    class Sink(Agent):
        def run(self):
            self.output([self.measure(self.qrecv("Source")) for _ in self.qstream])

    src, left, right = Source(stream), Sink(stream, name="Left"), Sink(stream, name="Right")
    src.qconnect(left)
    src.qconnect(right)
    out = Simulation(src, left, right, seed=3).run()
    assert out["Left"] == out["Right"]
    assert 50 < sum(out["Left"]) < 150
