"""Timed conduits and quantum error models.

A :class:`Conduit` is a blocking FIFO that stamps every item with its
emission time and, on delivery, adds the propagation delay
``length_km / signal_speed``. Quantum conduits additionally pass every
delivered qubit through an :class:`ErrorModel`, which either returns the
qubit (possibly after mutating its system) or ``None`` when the qubit was
lost. ``None`` is the lost-qubit marker throughout the package.
"""

from __future__ import annotations

import queue
import threading
from fractions import Fraction

import numpy as np

from .errors import BrokenLinkError, UsageError
from .gates import SIGMA_X, SIGMA_Y, SIGMA_Z, apply_single_qubit_unitary

SPEED_OF_LIGHT_KM_S = 2.998e5

#: Lost-qubit marker returned by error models and ``qrecv``.
LOST = None


def exact(value) -> Fraction:
    """Exact rational for a float, read through its shortest decimal repr."""
    if isinstance(value, Fraction):
        return value
    return Fraction(repr(float(value)))


def attenuation_drop_probability(alpha_db_per_km: float, length_km: float) -> float:
    """Probability that one photon is lost over ``length_km`` of fiber."""
    return 1.0 - 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def haar_unitary(rng) -> np.ndarray:
    """Haar-distributed 2x2 unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


class ErrorModel:
    """Base class: ``apply(qubit, length_km)`` returns the qubit or ``None``.

    Subclasses override :meth:`apply`. ``rng`` is assigned by the channel
    when the simulation is seeded; models must draw randomness only from it.
    """

    def __init__(self, rng=None):
        self.rng = rng if rng is not None else np.random.default_rng()

    def apply(self, qubit, length_km: float):
        return qubit

    def __call__(self, qubit, length_km: float):
        if qubit is None:
            return None
        return self.apply(qubit, length_km)

    def reseed(self, rng):
        self.rng = rng


NoError = ErrorModel


class Attenuation(ErrorModel):
    """Fiber loss: drop with probability ``1 - 10**(-alpha * L / 10)``.

    Lost qubits are simply not delivered; their system is left untouched.
    """

    def __init__(self, alpha_db_per_km: float = 0.16, rng=None):
        super().__init__(rng)
        self.alpha_db_per_km = float(alpha_db_per_km)
        self.lost = 0
        self.seen = 0

    def drop_probability(self, length_km: float) -> float:
        return attenuation_drop_probability(self.alpha_db_per_km, length_km)

    def apply(self, qubit, length_km):
        self.seen += 1
        p = self.drop_probability(length_km)
        if p > 0 and self.rng.random() < p:
            self.lost += 1
            return None
        return qubit


class RandomUnitary(ErrorModel):
    """With probability ``p_error`` apply a Haar-random unitary to the qubit."""

    def __init__(self, p_error: float = 1.0, rng=None, sampler=None):
        super().__init__(rng)
        self.p_error = float(p_error)
        self.sampler = sampler or haar_unitary
        self.applied = 0

    def apply(self, qubit, length_km):
        if self.rng.random() < self.p_error:
            apply_single_qubit_unitary(qubit, self.sampler(self.rng))
            self.applied += 1
        return qubit


class Custom(ErrorModel):
    """Wrap a plain function ``hook(qubit, length_km, rng) -> qubit | None``."""

    def __init__(self, hook, rng=None):
        super().__init__(rng)
        self.hook = hook

    def apply(self, qubit, length_km):
        return self.hook(qubit, length_km, self.rng)


class Chain(ErrorModel):
    """Apply several models in order; a loss short-circuits the rest."""

    def __init__(self, *models, rng=None):
        super().__init__(rng)
        self.models = list(models)

    def reseed(self, rng):
        super().reseed(rng)
        for m, child in zip(self.models, rng.spawn(len(self.models))):
            m.reseed(child)

    def apply(self, qubit, length_km):
        for m in self.models:
            qubit = m(qubit, length_km)
            if qubit is None:
                return None
        return qubit


def random_single_qubit_corruption(group, rng, sampler=None):
    """Corrupt exactly one of nine qubits with a random unitary.

    Returns ``(index, unitary)`` so tests can inspect what happened.
    ``sampler(rng)`` replaces the Haar sampler (e.g. to force a Pauli).
    """
    group = list(group)
    if len(group) != 9:
        raise UsageError(f"corruption acts on groups of 9 qubits, got {len(group)}")
    index = int(rng.integers(9))
    u = (sampler or haar_unitary)(rng)
    apply_single_qubit_unitary(group[index], u)
    return index, u


class GroupCorruption(ErrorModel):
    """Per-qubit view of :func:`random_single_qubit_corruption`.

    Qubits stream through one at a time; at the start of every group of
    ``group_size`` qubits the model picks the position and the unitary, and
    applies it when that qubit passes. ``records`` collects
    ``(group, index, unitary)`` for every corrupted group.
    """

    def __init__(self, p_error: float = 1.0, group_size: int = 9, rng=None, sampler=None):
        super().__init__(rng)
        self.p_error = float(p_error)
        self.group_size = group_size
        self.sampler = sampler or haar_unitary
        self.records = []
        self._position = 0
        self._group = -1
        self._pending = None

    def __call__(self, qubit, length_km):
        # Lost slots still advance the group position.
        if self._position == 0:
            self._group += 1
            self._pending = None
            if self.rng.random() < self.p_error:
                index = int(self.rng.integers(self.group_size))
                self._pending = (index, self.sampler(self.rng))
        pos = self._position
        self._position = (self._position + 1) % self.group_size
        if qubit is None:
            return None
        if self._pending is not None and self._pending[0] == pos:
            index, u = self._pending
            apply_single_qubit_unitary(qubit, u)
            self.records.append((self._group, index, u))
        return qubit


PAULIS = {"X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


class Conduit:
    """One-directional blocking FIFO between two agents.

    ``transmit`` blocks only when ``capacity`` is set and reached;
    ``deliver`` blocks until an item arrives. Both give up with
    :class:`BrokenLinkError` once the conduit is closed and drained, or when
    ``abort`` (a :class:`threading.Event`) is set.
    """

    POLL = 0.05

    def __init__(self, kind: str, length_km: float = 0.0, signal_speed: float = SPEED_OF_LIGHT_KM_S,
                 error_model: ErrorModel | None = None, capacity: int | None = None, name: str = ""):
        if kind not in ("classical", "quantum"):
            raise ValueError(f"kind must be 'classical' or 'quantum', got {kind!r}")
        if length_km < 0:
            raise ValueError("length_km must be non-negative")
        if signal_speed <= 0:
            raise ValueError("signal_speed must be positive")
        self.kind = kind
        self.length_km = float(length_km)
        self.signal_speed = float(signal_speed)
        self.error_model = error_model if error_model is not None else ErrorModel()
        self.capacity = capacity
        self.name = name
        self._queue = queue.Queue(maxsize=capacity or 0)
        self._closed = False
        self.abort = None
        self.sent = 0
        self.delivered = 0
        self.lost = 0

    @property
    def delay(self) -> Fraction:
        return exact(self.length_km) / exact(self.signal_speed)

    def _aborted(self):
        return self.abort is not None and self.abort.is_set()

    def transmit(self, item, emission_time) -> None:
        if self._closed:
            raise BrokenLinkError(f"conduit {self.name} is closed")
        entry = (item, exact(emission_time))
        while True:
            if self._aborted():
                raise BrokenLinkError(f"simulation aborted while sending on {self.name}")
            try:
                self._queue.put(entry, timeout=self.POLL)
                self.sent += 1
                return
            except queue.Full:
                continue

    def deliver(self):
        """Next item as ``(item_or_None, receive_time)``; receive_time is exact."""
        while True:
            try:
                entry = self._queue.get(timeout=self.POLL)
            except queue.Empty:
                if self._aborted():
                    raise BrokenLinkError(f"simulation aborted while receiving on {self.name}")
                if self._closed and self._queue.empty():
                    raise BrokenLinkError(f"peer closed {self.name} with nothing left to receive")
                continue
            item, emitted = entry
            if self.kind == "quantum" and item is not None:
                item = self.error_model(item, self.length_km)
                if item is None:
                    self.lost += 1
            self.delivered += 1
            return item, emitted + self.delay

    def close(self) -> None:
        self._closed = True

    def __len__(self):
        return self._queue.qsize()

    def __repr__(self):
        return f"Conduit({self.name or self.kind}, length_km={self.length_km})"


def transmit(conduit: Conduit, item, emission_time) -> None:
    conduit.transmit(item, emission_time)


def deliver(conduit: Conduit):
    return conduit.deliver()


def apply_error(model: ErrorModel, qubit, length_km: float):
    return model(qubit, length_km)
