from shapejc import HarmonicOscillator, Morse
from shapejc.grid import GridSpec, default_grid, shape_invariance_residual

# A(a1) A(a1)^T - A(a2)^T A(a2) should equal R(a1) times the identity.
# On a grid the leftover is the O(h^2) error of the discrete [D1, W].
for fam in (HarmonicOscillator(mass=1.0, omega=1.0), Morse(v0=25.0, lam=1.0, mass=0.5)):
    g = default_grid(fam)
    r1 = shape_invariance_residual(fam, g)
    r2 = shape_invariance_residual(fam, g.refine())
    print(type(fam).__name__, r1, r2, "ratio", r1 / r2)

# Use the wrong remainder and the residual jumps to about 1
morse = Morse(v0=25.0, lam=1.0, mass=0.5)
print("broken:", shape_invariance_residual(morse, GridSpec(-2.0, 7.5, 1000), remainder_shift=1.0))
