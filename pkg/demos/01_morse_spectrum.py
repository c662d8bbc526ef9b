import math

from shapejc import Branch, HarmonicOscillator, Morse, ScalingChain, spectrum_table
from shapejc import algebra

# The reference Morse well: V0 = 25, lambda = 1, M = 1/2, hbar = 1.
# The chain parameter drops by hbar*lam/sqrt(2M) = 1 at every step.
morse = Morse(v0=25.0, lam=1.0, mass=0.5)
print("chain a_1..a_5:", algebra.parameter_chain(morse, 4))
print("remainders:", [algebra.remainder(morse, k) for k in range(1, 5)])
print("bound levels 0..", algebra.level_count(morse))

# eps_n is a telescoping sum of remainders, so only a_1 and a_{n+1} matter
for n in range(5):
    print(f"eps_{n} = {algebra.epsilon(morse, n):g}")

# Dressing with a drive Omega splits each eps_{m+1} into a doublet
table = spectrum_table(morse, 2.0, 4)
print("\nground:", table.ground)
for lev in table.levels:
    print(f"m={lev.m}  {lev.e_minus:10.6f} {lev.e_plus:10.6f}   (eps={lev.epsilon:g})")

# The doublets add up to 2*eps and are split by 2*sqrt(hbar*Omega*eps)
lev = table.levels[1]
print("pair sum", lev.e_minus + lev.e_plus, "split", lev.e_plus - lev.e_minus, 2 * math.sqrt(2 * 14))

# The same closed form written out in V0, lambda, M
print("closed form m=1+:", algebra.morse_closed_form(morse, 2.0, 1, Branch.PLUS))

# The oscillator gives back the standard JC ladder (m+1) +/- sqrt(Omega*(m+1))
ho = HarmonicOscillator(mass=1.0, omega=1.0)
print("\nHO, Omega=4:", [(lev.e_minus, lev.e_plus) for lev in spectrum_table(ho, 4.0, 3).levels])

# A geometric chain has an accumulation point at r1/(1-q)
sc = ScalingChain(r1=1.0, q=0.5)
print("scaling eps_1..eps_6:", [algebra.epsilon(sc, n) for n in range(1, 7)])
