"""
Teleportation
=============

Alice teleports ``RX(theta)|0>`` to Bob using a shared Bell pair and two
classical bits. Over an ensemble of 250 systems per angle the fraction of
1 outcomes at Bob tracks ``sin^2(theta / 2)``.
"""

import numpy as np

from qnetsim.protocols import run_teleportation
from qnetsim.protocols.teleportation import default_angles

angles = default_angles(9)
fractions, report = run_teleportation(angles, ensemble=250, seed=7)

print(" theta   expected   observed")
for theta, f in zip(angles, fractions):
    print(f"{theta:6.3f}   {np.sin(theta / 2) ** 2:8.3f}   {f:8.3f}")
