"""Network nodes: agents with memory, clocks and channel endpoints.

Subclass :class:`Agent` and implement :meth:`Agent.run`::

    class Alice(Agent):
        def run(self):
            for qsys in self.qstream:
                q = qsys.qubit(0)
                X(q)
                self.qsend(bob, q)

Agents are wired with :meth:`Agent.qconnect` / :meth:`Agent.cconnect` and
executed concurrently by :class:`~qnetsim.simulation.Simulation`.

Clocks are kept as exact rationals internally, so ``1000`` pulses of
``1e-9`` s advance a clock by exactly ``1e-6`` s; :attr:`Agent.clock`
reports a float.
"""

from __future__ import annotations

import copy
import threading
from fractions import Fraction

import numpy as np

from .channels import SPEED_OF_LIGHT_KM_S, Conduit, ErrorModel, exact
from .errors import ConfigurationError, HolderViolation, RoutingError, UsageError
from .qstate import QubitRef

DEFAULT_PULSE_LENGTH = 1e-9


class OutputSink(dict):
    """Shared map from agent name to the payload it published."""

    def __init__(self):
        super().__init__()
        self._lock = threading.Lock()

    def publish(self, name, payload):
        with self._lock:
            if name in self:
                raise UsageError(f"agent {name!r} already published its output")
            self[name] = payload


class HolderRegistry:
    """Debug bookkeeping of which agent (or conduit) holds each qubit.

    Qubits nobody has sent yet are unclaimed; the first agent to send one
    claims it.
    """

    def __init__(self):
        self._holders = {}
        self._lock = threading.Lock()

    def holder(self, qubit: QubitRef):
        return self._holders.get(qubit.key)

    def release(self, qubit: QubitRef, sender: str, conduit: str):
        with self._lock:
            current = self._holders.get(qubit.key)
            if current is not None and current != sender:
                raise HolderViolation(f"{sender} sent {qubit} which is held by {current}")
            self._holders[qubit.key] = ("in-flight", conduit)

    def acquire(self, qubit: QubitRef, receiver: str):
        with self._lock:
            self._holders[qubit.key] = receiver

    def snapshot(self):
        with self._lock:
            return dict(self._holders)


def _bit_count(payload):
    if isinstance(payload, (bytes, bytearray)):
        return 8 * len(payload)
    if isinstance(payload, (list, tuple, np.ndarray)):
        return max(len(payload), 1)
    return 1


def _make_model(model):
    if model is None:
        return ErrorModel()
    if isinstance(model, ErrorModel):
        return model
    return model()


class Agent:
    """A quantum network node.

    Parameters
    ----------
    qstream : EnsembleStore, optional
        Shared ensemble; the agent iterates it through its own cursor
        (``self.qstream``).
    out : OutputSink, optional
        Where :meth:`output` publishes results.
    name : str, optional
        Unique agent name; defaults to the class name.
    pulse_length : float
        Seconds charged to the clock per transmitted qubit or classical message.
    classical_metering : {"message", "bit"}
        Charge ``pulse_length`` once per classical message or once per bit.
    """

    def __init__(self, qstream=None, out=None, name=None, pulse_length=DEFAULT_PULSE_LENGTH,
                 classical_metering="message"):
        self.name = name or type(self).__name__
        self.stream = qstream
        self.qstream = qstream.cursor(self.name, self._progress) if qstream is not None else None
        self.out = out
        self.pulse_length = float(pulse_length)
        if classical_metering not in ("message", "bit"):
            raise ValueError("classical_metering must be 'message' or 'bit'")
        self.classical_metering = classical_metering
        self.cmem = {}
        self.qmem = []
        self._clock = Fraction(0)
        self.qchannels_out = {}
        self.qchannels_in = {}
        self.cchannels_out = {}
        self.cchannels_in = {}
        self.rng = np.random.default_rng()
        self.holders = None
        self.progress_queue = None
        self.blocked_on = None

    # -- program ---------------------------------------------------------

    def run(self):
        """Agent program; override in subclasses."""
        raise NotImplementedError

    @staticmethod
    def shared_output() -> OutputSink:
        return OutputSink()

    def output(self, payload):
        """Publish this agent's result (at most once per run)."""
        if self.out is None:
            raise UsageError(f"agent {self.name!r} has no output sink")
        self.out.publish(self.name, payload)

    publish = output

    def measure(self, qubit) -> int:
        return qubit.system.measure_qubit(qubit.qubit_index, self.rng).bit

    # -- clock -----------------------------------------------------------

    @property
    def clock(self) -> float:
        return float(self._clock)

    @property
    def exact_clock(self) -> Fraction:
        return self._clock

    def _set_clock(self, value: Fraction):
        if value < self._clock:
            raise AssertionError(f"clock of {self.name} would move backwards")
        self._clock = value

    def _progress(self, owner, consumed, total):
        if self.progress_queue is not None:
            self.progress_queue.put((owner, consumed, total))

    # -- wiring ----------------------------------------------------------

    @property
    def endpoints(self):
        peers = set(self.qchannels_out) | set(self.qchannels_in) | set(self.cchannels_out) | set(self.cchannels_in)
        return {
            p: {
                "quantum_out": self.qchannels_out.get(p),
                "quantum_in": self.qchannels_in.get(p),
                "classical_out": self.cchannels_out.get(p),
                "classical_in": self.cchannels_in.get(p),
            }
            for p in peers
        }

    def conduits(self):
        """Every conduit this agent sends on or receives from."""
        return [*self.qchannels_out.values(), *self.qchannels_in.values(),
                *self.cchannels_out.values(), *self.cchannels_in.values()]

    def _check_peer(self, other, table):
        if other is self or other.name == self.name:
            raise ConfigurationError(f"cannot connect {self.name} to itself")
        if other.name in table:
            raise ConfigurationError(f"{self.name} and {other.name} are already connected")

    def qconnect(self, other: "Agent", error_model=None, length=0.0,
                 signal_speed=SPEED_OF_LIGHT_KM_S, capacity=None):
        """Install a pair of quantum conduits between ``self`` and ``other``.

        ``error_model`` is an :class:`ErrorModel` class/factory (one instance
        per direction) or an instance (copied for the reverse direction).
        """
        self._check_peer(other, self.qchannels_out)
        forward = _make_model(error_model)
        backward = copy.deepcopy(forward) if isinstance(error_model, ErrorModel) else _make_model(error_model)
        ab = Conduit("quantum", length, signal_speed, forward, capacity, f"{self.name}->{other.name}:q")
        ba = Conduit("quantum", length, signal_speed, backward, capacity, f"{other.name}->{self.name}:q")
        self.qchannels_out[other.name] = other.qchannels_in[self.name] = ab
        other.qchannels_out[self.name] = self.qchannels_in[other.name] = ba

    def cconnect(self, other: "Agent", length=0.0, signal_speed=SPEED_OF_LIGHT_KM_S, capacity=None):
        """Install a pair of classical conduits between ``self`` and ``other``."""
        self._check_peer(other, self.cchannels_out)
        ab = Conduit("classical", length, signal_speed, None, capacity, f"{self.name}->{other.name}:c")
        ba = Conduit("classical", length, signal_speed, None, capacity, f"{other.name}->{self.name}:c")
        self.cchannels_out[other.name] = other.cchannels_in[self.name] = ab
        other.cchannels_out[self.name] = self.cchannels_in[other.name] = ba

    # -- communication ---------------------------------------------------

    @staticmethod
    def _peer_name(peer):
        return peer if isinstance(peer, str) else peer.name

    def _route(self, table, peer, kind):
        name = self._peer_name(peer)
        try:
            return table[name]
        except KeyError:
            raise RoutingError(f"{self.name} has no {kind} link to {name}") from None

    def qsend(self, target, qubit) -> None:
        """Send ``qubit`` (or ``None`` for an empty pulse slot) to ``target``."""
        conduit = self._route(self.qchannels_out, target, "outgoing quantum")
        if qubit is not None and self.holders is not None:
            self.holders.release(qubit, self.name, conduit.name)
        self._set_clock(self._clock + exact(self.pulse_length))
        self._transmit(conduit, qubit)

    def qrecv(self, source):
        """Block until a qubit arrives from ``source``; ``None`` if it was lost."""
        conduit = self._route(self.qchannels_in, source, "incoming quantum")
        self.blocked_on = conduit.name
        try:
            qubit, arrival = conduit.deliver()
        finally:
            self.blocked_on = None
        self._set_clock(max(self._clock, arrival))
        if qubit is not None and self.holders is not None:
            self.holders.acquire(qubit, self.name)
        return qubit

    def csend(self, target, payload) -> None:
        conduit = self._route(self.cchannels_out, target, "outgoing classical")
        pulses = _bit_count(payload) if self.classical_metering == "bit" else 1
        self._set_clock(self._clock + pulses * exact(self.pulse_length))
        self._transmit(conduit, payload)

    def _transmit(self, conduit, item):
        # a full bounded conduit blocks the sender, which counts for deadlock detection
        self.blocked_on = conduit.name if conduit.capacity else None
        try:
            conduit.transmit(item, self._clock)
        finally:
            self.blocked_on = None

    def crecv(self, source):
        conduit = self._route(self.cchannels_in, source, "incoming classical")
        self.blocked_on = conduit.name
        try:
            payload, arrival = conduit.deliver()
        finally:
            self.blocked_on = None
        self._set_clock(max(self._clock, arrival))
        return payload

    # -- quantum memory --------------------------------------------------

    def qstore(self, qubit):
        self.qmem.append(qubit)

    def qretrieve(self, index=0):
        return self.qmem.pop(index)

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, clock={self.clock:.3e})"


def qconnect(a: Agent, b: Agent, error_model=None, length_km=0.0, **kwargs):
    a.qconnect(b, error_model, length_km, **kwargs)


def cconnect(a: Agent, b: Agent, length_km=0.0, **kwargs):
    a.cconnect(b, length_km, **kwargs)
