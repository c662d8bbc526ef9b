"""Generalized Jaynes-Cummings spectra for shape-invariant potentials.

Submodules:

``algebra``  families, remainders, closed-form spectra
``dressed``  exact truncated matrices in the dressed basis
``grid``     finite-difference position-space cross-checks
``linalg``   symmetric eigensolvers
``cli``      command-line front end
"""

from .algebra import (
    UNBOUNDED,
    Branch,
    HarmonicOscillator,
    Morse,
    PotentialFamily,
    ScalingChain,
    SpectrumTable,
    energy_level,
    epsilon,
    jc_eigenvalue,
    level_count,
    morse_closed_form,
    parameter_chain,
    remainder,
    spectrum_table,
    superpotential,
)
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    EigensolverFailure,
    GridTooCoarse,
    InvalidFamily,
    LevelOutOfRange,
    MatchFailure,
    NegativeDriveStrength,
    ShapeJCError,
    UnsupportedFamily,
)

__version__ = "0.1.0"
