"""Ensembles of equally-sized quantum systems in one contiguous block.

All agents of a simulation run as threads of one process, so the block is
shared simply by handing out the same :class:`EnsembleStore`. There are no
per-system locks: only the agent currently holding a qubit reference may
touch that qubit's system, and holding changes hands only through channels.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import SizeError
from .qstate import DensityState, Precision, check_size

_ids = itertools.count(1)


class EnsembleStore:
    """``count`` systems of ``system_size`` qubits, each initialised to ``|0..0>``.

    The block is a ``(count, 2**N, 2**N)`` array; system ``i`` occupies flat
    entries ``[i * 4**N, (i + 1) * 4**N)``.
    """

    def __init__(self, system_size: int, count: int, precision="double", shared: bool = True):
        check_size(system_size)
        if int(count) != count or count < 0:
            raise SizeError(f"count must be a non-negative integer, got {count!r}")
        self.id = next(_ids)
        self.system_size = int(system_size)
        self.count = int(count)
        self.precision = Precision.of(precision)
        self.shared = shared
        dim = 1 << self.system_size
        try:
            self.block = np.zeros((self.count, dim, dim), dtype=self.precision.dtype)
        except MemoryError as exc:
            raise SizeError(
                f"cannot allocate {self.count} systems of {self.system_size} qubits"
            ) from exc
        self.block[:, 0, 0] = 1
        self.next_index = 0

    @property
    def nbytes(self) -> int:
        return self.block.nbytes

    @property
    def system_nbytes(self) -> int:
        return self.block[0].nbytes if self.count else (4 ** self.system_size) * self.precision.dtype.itemsize

    def __len__(self):
        return self.count

    def system_at(self, i: int) -> DensityState:
        """View of system ``i``; writes go straight to the shared block."""
        if not 0 <= i < self.count:
            raise IndexError(f"system index {i} out of range for stream of {self.count}")
        return DensityState(self.block[i], self, i)

    __getitem__ = system_at

    def cursor(self, owner=None, on_progress=None) -> "StreamCursor":
        """A fresh, independent iteration cursor over this store."""
        return StreamCursor(self, owner, on_progress)

    def __iter__(self):
        # The store's own cursor; exhausted until reset().
        while self.next_index < self.count:
            i = self.next_index
            self.next_index += 1
            yield self.system_at(i)

    def reset(self) -> None:
        self.next_index = 0

    def __repr__(self):
        return (f"EnsembleStore(system_size={self.system_size}, count={self.count}, "
                f"precision={self.precision.value})")


class StreamCursor:
    """Per-agent iterator over a shared store.

    Each agent gets its own cursor so two agents can both walk all systems.
    ``on_progress(owner, consumed, total)`` is called after each system is
    handed out.
    """

    def __init__(self, store: EnsembleStore, owner=None, on_progress=None):
        self.store = store
        self.owner = owner
        self.on_progress = on_progress
        self.next_index = 0

    def __iter__(self):
        store = self.store
        while self.next_index < store.count:
            i = self.next_index
            self.next_index += 1
            yield store.system_at(i)
            if self.on_progress is not None:
                self.on_progress(self.owner, self.next_index, store.count)

    def __len__(self):
        return self.store.count

    def __getattr__(self, name):
        return getattr(self.store, name)

    def reset(self) -> None:
        self.next_index = 0


def new_stream(system_size: int, count: int, precision="double", shared: bool = True) -> EnsembleStore:
    return EnsembleStore(system_size, count, precision, shared)


def system_at(store: EnsembleStore, i: int) -> DensityState:
    return store.system_at(i)


def iterate(store: EnsembleStore):
    return iter(store)
