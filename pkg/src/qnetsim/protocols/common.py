"""Bit streams and run reports shared by the protocol demos."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..rng import derive_rng


class BitStream:
    """An ordered sequence of bits with a note of where it came from."""

    def __init__(self, bits, origin="generated"):
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        if arr.ndim != 1 or np.any(arr > 1):
            raise ValueError("a bit stream is a 1-D sequence of 0/1 values")
        self.bits = arr
        self.origin = origin

    @classmethod
    def generate(cls, n, seed=None):
        return cls(derive_rng(seed, "bitstream").integers(0, 2, size=int(n), dtype=np.uint8), "generated")

    @classmethod
    def from_bytes(cls, data: bytes, origin="generated"):
        return cls(np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)), origin)

    @classmethod
    def from_text(cls, text: str):
        return cls.from_bytes(text.encode("utf-8"))

    @classmethod
    def from_file(cls, path):
        return cls.from_bytes(Path(path).read_bytes(), origin="file")

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    def to_text(self, errors="replace") -> str:
        return self.to_bytes().decode("utf-8", errors=errors)

    def pairs(self):
        if len(self.bits) % 2:
            raise ValueError("bit stream length must be even to be sent in pairs")
        return self.bits.reshape(-1, 2)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def __array__(self, dtype=None, copy=None):
        return self.bits if dtype is None else self.bits.astype(dtype)

    def __eq__(self, other):
        return np.array_equal(self.bits, np.asarray(other, dtype=np.uint8).ravel())

    def __repr__(self):
        return f"BitStream(len={len(self.bits)}, origin={self.origin!r})"


def as_bitstream(data) -> BitStream:
    if isinstance(data, BitStream):
        return data
    if isinstance(data, (bytes, bytearray)):
        return BitStream.from_bytes(data)
    if isinstance(data, str):
        return BitStream.from_text(data)
    return BitStream(data)


@dataclass
class ProtocolReport:
    outputs: dict = field(default_factory=dict)
    clocks: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)

    @classmethod
    def from_agents(cls, agents, sink, **counters):
        return cls(dict(sink), {a.name: a.clock for a in agents}, dict(counters))

    def to_dict(self):
        def plain(x):
            if isinstance(x, np.ndarray):
                if np.iscomplexobj(x):
                    return np.stack([x.real, x.imag], axis=-1).tolist()
                return x.tolist()
            if isinstance(x, (np.integer,)):
                return int(x)
            if isinstance(x, (np.floating,)):
                return float(x)
            if isinstance(x, dict):
                return {str(k): plain(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [plain(v) for v in x]
            return x

        return {"clocks": plain(self.clocks), "counters": plain(self.counters)}


def link_counters(agents):
    """Sent/delivered/lost counts for every quantum conduit among ``agents``."""
    out = {}
    for a in agents:
        for c in a.qchannels_out.values():
            out[c.name] = {"sent": c.sent, "delivered": c.delivered, "lost": c.lost}
    return out
