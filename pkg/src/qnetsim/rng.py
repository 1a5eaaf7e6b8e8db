"""Seed derivation and the per-thread default random generator.

Every agent gets its own :class:`numpy.random.Generator`, derived from the
simulation's master seed and the agent's name, so results do not depend on
thread scheduling. Code that measures a qubit without passing a generator
explicitly picks up the generator installed for the current thread.
"""

import contextlib
import hashlib
import threading

import numpy as np

_local = threading.local()
_fallback = np.random.default_rng()


def _key(part):
    if isinstance(part, int):
        return part & 0xFFFFFFFF
    digest = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def derive_rng(seed, *keys):
    """Return a generator determined only by ``seed`` and the ``keys`` path.

    ``derive_rng(7, "Alice")`` and ``derive_rng(7, "Alice", 3)`` are
    independent streams; the same arguments always give the same stream.
    """
    if seed is None:
        return np.random.default_rng()
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(_key(k) for k in keys))
    return np.random.default_rng(ss)


def current_rng():
    """Generator installed for this thread, or a process-wide unseeded one."""
    return getattr(_local, "rng", None) or _fallback


@contextlib.contextmanager
def use_rng(rng):
    previous = getattr(_local, "rng", None)
    _local.rng = rng
    try:
        yield rng
    finally:
        _local.rng = previous


def seed_default(seed):
    """Reseed the process-wide fallback generator (for scripts and notebooks)."""
    global _fallback
    _fallback = np.random.default_rng(seed)
