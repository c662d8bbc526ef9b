import numpy as np

from shapejc import Morse
from shapejc.dressed import (
    DressedBasis,
    commutator_diagonal,
    diagonalize_dressed,
    dressed_states,
    h_blocks,
    s_matrix,
)

np.set_printoptions(precision=4, suppress=True, linewidth=120)
morse = Morse(v0=25.0, lam=1.0, mass=0.5)

# Basis order is v0, u0, v1, u1, ... so every (u_m, v_{m+1}) pair sits together
basis = DressedBasis(2)
print(basis.labels)
print(s_matrix(morse, 2).entries)

# H = S^2 + sqrt(hbar*Omega) S is block diagonal: a 1x1 ground block
# and one 2x2 block per pair
for name, m, block in h_blocks(morse, 2.0, 2):
    print(name, block.tolist())

# Each pair is closed under S, so truncation costs nothing
spec = diagonalize_dressed(morse, 2.0, 3)
for label, num, ana in zip(spec.labels, spec.eigenvalues, spec.analytic):
    print(f"{label:7s} {num:12.8f} {ana:12.8f}")
print("max deviation", spec.max_deviation)

# Dressed states (u_m +/- v_{m+1})/sqrt(2) diagonalize S with eigenvalues +/- sqrt(eps_{m+1})
s = s_matrix(morse, 1).entries
for st in dressed_states(morse, 1):
    v = st.vector
    print(st.m, st.branch, v @ s @ v)

# [B-, B+] has the first differences of eps on its diagonal; the last entry
# is damaged by truncation and comes back separately
diag, edge = commutator_diagonal(morse, 3)
print("commutator", diag, "edge", edge)
