"""
Moving fermions into a separate register.

A transfer map sends M fermions into modes of a second register A, after
which they are distinguishable from the rest. The averaged spectrum of the
register state always majorizes the normalized M-body spectrum of the input.
The single-Kraus uniform map reaches equality.
"""
import numpy as np

from fermion_mbody import (
    apply_transfer_map,
    make_random,
    make_two_fermion,
    random_transfer_map,
    reduced_state_A,
    uniform_map,
    verify_transfer_majorization,
)

g = np.zeros((4, 4))
g[0, 1], g[2, 3] = np.sqrt(0.8), np.sqrt(0.2)
two = make_two_fermion(4, g - g.T)
branch = apply_transfer_map(two, uniform_map(4))[0]
print("uniform map, register spectrum:", np.round(reduced_state_A(branch.post_state).spectrum(), 6))
print("saturated:", verify_transfer_majorization(two, uniform_map(4)).saturated)

passes = 0
for t in range(50):
    rep = verify_transfer_majorization(make_random(6, 3, seed=t), random_transfer_map(6, 4, 1, 3, seed=t))
    passes += rep.holds and rep.entropy_holds
print(f"random maps D=6 -> D_A=4: {passes}/50 satisfy majorization and entropy bounds")
