"""Canonical protocols built on agents and channels."""

from .common import BitStream, ProtocolReport, as_bitstream
from .shor import DumbAlice, DumbBob, ShorAlice, ShorBob, run_shor_demo, shor_decode, shor_encode
from .superdense import Charlie, DenseAlice, DenseBob, Eve, run_interception, run_superdense
from .teleportation import TeleportAlice, TeleportBob, run_teleportation

__all__ = [
    "BitStream", "ProtocolReport", "as_bitstream",
    "shor_encode", "shor_decode", "run_shor_demo", "ShorAlice", "ShorBob", "DumbAlice", "DumbBob",
    "run_superdense", "run_interception", "Charlie", "DenseAlice", "DenseBob", "Eve",
    "run_teleportation", "TeleportAlice", "TeleportBob",
]
