"""
Largest M-body eigenvalue of the pair condensate as pairs are added.

Prints the analytic curves for D=30 and checks a few points against exact
diagonalization at D=12.
"""
from fermion_mbody import figure1_data, make_pair_condensate, rho_m

rows = figure1_data(30, [1, 2, 3, 4])
for M in (1, 2, 3, 4):
    curve = [v for k, m, v in rows if m == M]
    print(f"M={M}: " + " ".join(f"{v:6.3f}" for v in curve))
best = max((v, k) for k, m, v in rows if m == 2)
print(f"two-body peak {best[0]:.4f} at k={best[1]}")

for k, M, v in figure1_data(12, [2, 4], ks=[3, 4]):
    num = rho_m(make_pair_condensate(12, k), M).spectrum()[0]
    print(f"D=12 k={k} M={M}: formula {v:.6f}, eigensolve {num:.6f}")
