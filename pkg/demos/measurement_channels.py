"""
Entanglement under fermion-removal and occupancy measurements.

Removing a fermion at random (Kraus operators c_j / sqrt N) can only make the
normalized M-body spectrum less mixed on average. Measuring whether a single
mode is occupied is different: for a pair condensate it lowers the largest
two-body eigenvalue on average, breaking the first majorization inequality.
"""
from fermion_mbody import (
    appendix_b_report,
    check_channel,
    make_pair_condensate,
    make_random,
    measure_l_body,
    measure_occupancy,
    measure_single_fermion,
    rho_m,
)

state = make_random(8, 4, seed=1)
outcomes = measure_single_fermion(state)
print("single-fermion removal on a random D=8, N=4 state")
for M in (1, 2, 3):
    c = check_channel(state, outcomes, M)
    print(f"  M={M}: mixture deviation {c.mixture_deviation:.1e}, majorization holds: {c.holds}, "
          f"entropy {c.entropies['von-neumann'][0]:.4f} -> {c.entropies['von-neumann'][1]:.4f}")

outcomes = measure_l_body(state, 2)
print(f"two-fermion removal: {len(outcomes)} outcomes, "
      f"M=2 majorization holds: {check_channel(state, outcomes, 2).holds}")

pc = make_pair_condensate(12, 3)
occ = measure_occupancy(pc, 0)
print("\noccupancy of mode 0 in the D=12, k=3 pair condensate")
for o in occ:
    print(f"  outcome n_0={o.label}: p={o.probability:.3f}, top two-body eigenvalue "
          f"{rho_m(o.post_state, 2).spectrum()[0]:.4f}")
c = check_channel(pc, occ, 2)
print(f"  verdict {c.verdict.value}, first violated prefix {c.first_violation}")
print(" ", appendix_b_report(12, 3))
