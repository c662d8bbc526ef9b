"""Check the closed-form dressed spectrum against a finite-difference grid."""

import numpy as np

from shapejc import HarmonicOscillator, Morse
from shapejc.grid import GridSpec, build_single_channel, convergence_study, default_grid, verify_spectrum
from shapejc.linalg import eig_symmetric

morse = Morse(v0=25.0, lam=1.0, mass=0.5)

# Single channel first: A^dagger A on a grid should give eps_0..eps_4 = 0, 8, 14, 18, 20
grid = default_grid(morse, n_levels=9)
print(grid)
ham = build_single_channel(morse, 1, grid)
print(eig_symmetric(ham.matrix, select=("index", 0, 4)).values)

# The two-channel operator with the drive switched on
report = verify_spectrum(morse, 2.0, GridSpec(-2.5, 14.0, 1000))
for lev in report.levels:
    print(f"{lev.label:7s} {lev.analytic:12.6f} {lev.numeric:12.6f}  rel {lev.rel_error:.2e}")
print("ground leakage", report.ground_leakage)
print("error ratio under h -> h/2", report.convergence_ratio)

# Errors fall by 4 per halving of h: the scheme is second order
study = convergence_study(morse, 2.0, GridSpec(-2.5, 14.0, 1000))
for (h, err), p in zip(study.rows, [np.nan, *study.order]):
    print(f"h={h:.5f}  max rel {err:.3e}  p={p:.3f}")

# The oscillator with Omega = 4 has -1, 0 and 3 at the bottom
ho = HarmonicOscillator(mass=1.0, omega=1.0)
print([round(lev.numeric, 6) for lev in verify_spectrum(ho, 4.0, n_levels=3, refine_check=False).levels])
