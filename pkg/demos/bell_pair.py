"""
Bell pairs
==========

Entangle two qubits with a Hadamard and a CNOT, then measure both.
The two bits always agree, although each one on its own is a coin flip.
"""

import numpy as np

from qnetsim import CNOT, H, new_stream
from qnetsim.rng import seed_default

seed_default(1)

# 1000 two-qubit systems, all starting in |00>
stream = new_stream(2, 1000)

pairs = []
for qsys in stream:
    a, b = qsys.qubits
    H(a)
    CNOT(a, b)
    pairs.append((a.measure(), b.measure()))

pairs = np.array(pairs)
print("fraction of 1s on qubit a:", pairs[:, 0].mean())
print("pairs that agree:", np.mean(pairs[:, 0] == pairs[:, 1]))

# The reduced state of either half is maximally mixed
s = new_stream(2, 1)[0]
H(s.qubit(0))
CNOT(s.qubit(0), s.qubit(1))
print("reduced state of b:\n", s.partial_trace([1]).matrix.real)
