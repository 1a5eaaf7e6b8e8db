"""
Eavesdropping on superdense coding
==================================

Eve sits on the Alice-Bob link, measures every qubit and sends it on.
She learns nothing: her bits agree with Alice's about half the time.
Her measurement leaves the parity bit intact but scrambles the phase bit,
so Bob receives a half-corrupted message.
"""

import numpy as np

from qnetsim.protocols import BitStream, run_interception

bits = BitStream.generate(4000, seed=5)
eve, bob, report = run_interception(bits, seed=5)

sent = bits.pairs()
got = bob.reshape(-1, 2)
print("parity bits intact:", np.mean(got[:, 1] == sent[:, 1]))
print("phase bits intact: ", np.mean(got[:, 0] == sent[:, 0]))
print("Eve's guess rate:  ", np.mean(eve == sent[:, 1]))
