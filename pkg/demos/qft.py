"""
Quantum Fourier transform
=========================

Build the QFT from Hadamards and controlled phases and compare it with the
discrete Fourier transform. No swap network is applied, so the output
register comes out bit-reversed.
"""

import numpy as np

from qnetsim import build_qft, new_system
from qnetsim.qstate import from_matrix

n = 3
dim = 2**n

# Feed in |5> and read the output amplitudes off the density matrix
rho = np.zeros((dim, dim), dtype=complex)
rho[5, 5] = 1
s = from_matrix(rho)
build_qft(s.qubits)
amplitudes = s.matrix[:, 0] / np.sqrt(s.matrix[0, 0].real)

# Undo the bit reversal and compare with the DFT column
reverse = [int(format(i, f"0{n}b")[::-1], 2) for i in range(dim)]
dft = np.exp(2j * np.pi * 5 * np.arange(dim) / dim) / np.sqrt(dim)
print("max deviation from DFT:", np.abs(amplitudes[reverse] - dft).max())

# On |0...0> the QFT gives the uniform superposition
s = new_system(n)
build_qft(s.qubits)
print("diagonal of QFT|000>:", np.round(s.matrix.diagonal().real, 3))
