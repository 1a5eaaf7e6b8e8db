"""
Superdense coding
=================

Charlie sits halfway between Alice and Bob and hands each of them half of a
Bell pair. Alice encodes two bits per pair in her half and forwards it.
Every link is fiber with 0.16 dB/km of loss, and a lost qubit reads as 00.
"""

import numpy as np

from qnetsim.protocols import BitStream, run_superdense

message = "superdense coding sends two bits per qubit"
bits = BitStream.from_text(message)

received, report = run_superdense(bits, length_km=1.0, alpha_db_per_km=0.16, seed=3)

print("received:", BitStream(received).to_text())
print("bit errors:", report.counters["bit_errors"], "of", len(bits))
print("qubits lost:", report.counters["lost_qubits"])

# Without loss the message arrives intact
clean, _ = run_superdense(bits, alpha_db_per_km=0.0, seed=3)
print("noiseless:", BitStream(clean).to_text())
assert np.array_equal(clean, bits.bits)
