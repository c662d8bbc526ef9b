"""Shape-invariant potential families and their closed-form spectra.

Three families are supported:

* ``HarmonicOscillator``: translation chain with constant remainder ``hbar*omega``.
* ``Morse``: translation chain ``a_{k+1} = a_k - hbar*lam/sqrt(2M)`` with
  ``R(a_k) = a_k**2 - a_{k+1}**2`` and a finite bound spectrum.
* ``ScalingChain``: defined directly by its remainders ``r1 * q**(k-1)``;
  there is no closed-form superpotential, so it is analytic-only.

Level ``n`` of the lower partner ``A^dagger A`` has energy
``eps_n = sum_{k=1..n} R(a_k)`` and the generalized Jaynes-Cummings
Hamiltonian ``H = S^2 + sqrt(hbar*Omega) S`` has the doublets
``eps_{m+1} +/- sqrt(hbar*Omega*eps_{m+1})`` plus an uncoupled level at 0.
"""

from __future__ import annotations

import enum
import math
import operator
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFamily, LevelOutOfRange, NegativeDriveStrength, UnsupportedFamily

UNBOUNDED = math.inf


class Branch(enum.Enum):
    MINUS = -1
    PLUS = 1

    @property
    def sign(self) -> int:
        return self.value

    def __str__(self):
        return self.name.lower()


def _count(n, name="n", minimum=0):
    try:
        n = operator.index(n)
    except TypeError:
        raise TypeError(f"{name} must be an integer, got {n!r}") from None
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return n


def _positive(value, what):
    if not (math.isfinite(value) and value > 0):
        raise InvalidFamily(f"{what} must be positive and finite, got {value!r}")


class PotentialFamily:
    """Common interface of the shape-invariant families.

    Subclasses are frozen dataclasses carrying their physical parameters and
    ``hbar``; the methods here give the remainder rule and the chain.
    """

    key: str = ""
    grid_supported: bool = False

    def remainder(self, k: int) -> float:
        raise NotImplementedError

    def chain(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def epsilon(self, n: int) -> float:
        raise NotImplementedError

    def level_count(self) -> float:
        return UNBOUNDED

    def describe(self) -> dict:
        raise NotImplementedError

    def _check_level(self, n):
        count = self.level_count()
        if n > count:
            raise LevelOutOfRange(
                f"level {n} does not exist: {type(self).__name__} has bound levels "
                f"0..{count} only, i.e. at most {count} dressed pairs"
            )


@dataclass(frozen=True)
class HarmonicOscillator(PotentialFamily):
    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    key = "ho"
    grid_supported = True

    def __post_init__(self):
        _positive(self.mass, "mass")
        _positive(self.omega, "omega")
        _positive(self.hbar, "hbar")

    def remainder(self, k):
        return self.hbar * self.omega

    def chain(self, n):
        # Parameters never enter W for the oscillator; report the constant
        # remainder-generating parameter (the frequency) for every entry.
        return np.full(n + 1, self.omega)

    def epsilon(self, n):
        return n * self.hbar * self.omega

    def superpotential(self, k, x):
        return math.sqrt(self.mass / 2.0) * self.omega * np.asarray(x, dtype=float)

    def superpotential_derivative(self, k, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, math.sqrt(self.mass / 2.0) * self.omega)

    def describe(self):
        return {"name": "ho", "mass": self.mass, "omega": self.omega}


@dataclass(frozen=True)
class Morse(PotentialFamily):
    """Morse well ``V0*(exp(-2*lam*x) - 2*exp(-lam*x))``.

    The superpotential at chain parameter ``a`` is ``a - sqrt(V0)*exp(-lam*x)``
    with ``a_1 = sqrt(V0) - hbar*lam/(2*sqrt(2M))``; then ``A^dagger A`` equals
    the Morse Hamiltonian shifted up by ``a_1**2``.
    """

    v0: float = 25.0
    lam: float = 1.0
    mass: float = 0.5
    hbar: float = 1.0

    key = "morse"
    grid_supported = True

    def __post_init__(self):
        _positive(self.v0, "v0")
        _positive(self.lam, "lam")
        _positive(self.mass, "mass")
        _positive(self.hbar, "hbar")
        if not self.a1 > 0:
            raise InvalidFamily(
                f"Morse well supports no bound state: a1 = {self.a1!r} <= 0 "
                f"(need sqrt(V0) > hbar*lam/(2*sqrt(2M)))"
            )

    @property
    def step(self) -> float:
        """Chain decrement ``hbar*lam/sqrt(2M)``."""
        return self.hbar * self.lam / math.sqrt(2.0 * self.mass)

    @property
    def a1(self) -> float:
        return math.sqrt(self.v0) - 0.5 * self.step

    def a(self, k):
        return self.a1 - (k - 1) * self.step

    def chain(self, n):
        return self.a1 - np.arange(n + 1) * self.step

    def level_count(self):
        # largest n with a_{n+1} > 0
        n = math.floor(self.a1 / self.step)
        if self.a(n + 1) <= 0:
            n -= 1
        return n

    def remainder(self, k):
        if self.a(k + 1) <= 0:
            raise LevelOutOfRange(
                f"R(a_{k}) needs a_{k + 1} > 0; the Morse chain has {self.level_count()} "
                f"excited bound levels"
            )
        return self.a(k) ** 2 - self.a(k + 1) ** 2

    def epsilon(self, n):
        self._check_level(n)
        return self.a1**2 - self.a(n + 1) ** 2

    def superpotential(self, k, x):
        return self.a(k) - math.sqrt(self.v0) * np.exp(-self.lam * np.asarray(x, dtype=float))

    def superpotential_derivative(self, k, x):
        return self.lam * math.sqrt(self.v0) * np.exp(-self.lam * np.asarray(x, dtype=float))

    def describe(self):
        return {"name": "morse", "v0": self.v0, "lambda": self.lam, "mass": self.mass}


@dataclass(frozen=True)
class ScalingChain(PotentialFamily):
    """Chain defined by its remainders ``R(a_k) = r1 * q**(k-1)``, ``0 < q < 1``."""

    r1: float = 1.0
    q: float = 0.5
    hbar: float = 1.0

    key = "scaling"
    grid_supported = False

    def __post_init__(self):
        _positive(self.r1, "r1")
        _positive(self.hbar, "hbar")
        if not 0 < self.q < 1:
            raise InvalidFamily(f"scaling ratio q must lie in (0, 1), got {self.q!r}")

    def remainder(self, k):
        return self.r1 * self.q ** (k - 1)

    def chain(self, n):
        return self.r1 * self.q ** np.arange(n + 1)

    def epsilon(self, n):
        return self.r1 * (1.0 - self.q**n) / (1.0 - self.q)

    def describe(self):
        return {"name": "scaling", "r1": self.r1, "q": self.q}


FAMILIES = {cls.key: cls for cls in (HarmonicOscillator, Morse, ScalingChain)}


def _check_family(family):
    if not isinstance(family, PotentialFamily):
        raise InvalidFamily(f"not a potential family: {family!r}")
    return family


# --- operations -----------------------------------------------------------


def parameter_chain(family: PotentialFamily, n: int) -> np.ndarray:
    """Chain values ``a_1 .. a_{n+1}``.

    For ``ScalingChain`` the entries are the remainders ``r1*q**(k-1)``
    since the chain itself is only defined through them.
    """
    n = _count(n)
    return _check_family(family).chain(n)


def remainder(family: PotentialFamily, k: int) -> float:
    k = _count(k, "k", 1)
    return _check_family(family).remainder(k)


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    epsilon: float


def energy_level(family: PotentialFamily, n: int) -> EnergyLevel:
    n = _count(n)
    return EnergyLevel(n, float(_check_family(family).epsilon(n)))


def epsilon(family: PotentialFamily, n: int) -> float:
    """Shorthand for ``energy_level(family, n).epsilon``."""
    return energy_level(family, n).epsilon


def level_count(family: PotentialFamily) -> float:
    """Highest bound level index, or ``UNBOUNDED`` (``math.inf``)."""
    return _check_family(family).level_count()


def _check_drive(omega):
    if not math.isfinite(omega):
        raise NegativeDriveStrength(f"drive strength must be finite, got {omega!r}")
    if omega < 0:
        raise NegativeDriveStrength(f"drive strength Omega must be >= 0, got {omega!r}")
    return float(omega)


def jc_eigenvalue(family: PotentialFamily, omega: float, m: int, branch: Branch) -> float:
    """Dressed level ``eps_{m+1} +/- sqrt(hbar*Omega*eps_{m+1})``.

    The uncoupled level at 0 is not part of any doublet and is not returned here.
    """
    omega = _check_drive(omega)
    m = _count(m, "m")
    eps = epsilon(family, m + 1)
    return eps + Branch(branch).sign * math.sqrt(family.hbar * omega * eps)


def morse_closed_form(family: Morse, omega: float, m: int, branch: Branch) -> float:
    """Morse doublet energy written out in the physical parameters V0, lam, M."""
    if not isinstance(family, Morse):
        raise UnsupportedFamily("morse_closed_form needs a Morse family")
    omega = _check_drive(omega)
    m = _count(m, "m")
    family._check_level(m + 1)
    hb, v0, lam, mass = family.hbar, family.v0, family.lam, family.mass
    base = math.sqrt(v0) * hb * lam / math.sqrt(2 * mass) * (m + 1) * (
        2 - hb * lam / math.sqrt(2 * mass * v0) * (m + 2)
    )
    split = math.sqrt(
        hb * omega * math.sqrt(v0) * hb * lam / math.sqrt(2 * mass) * (m + 1)
        * (2 - hb * lam / math.sqrt(2 * mass * v0) * (m + 2))
    )
    return base + Branch(branch).sign * split


def superpotential(family: PotentialFamily, k: int, x):
    k = _count(k, "k", 1)
    if not _check_family(family).grid_supported:
        raise UnsupportedFamily(f"{type(family).__name__} has no closed-form superpotential")
    return family.superpotential(k, x)


def superpotential_derivative(family: PotentialFamily, k: int, x):
    k = _count(k, "k", 1)
    if not _check_family(family).grid_supported:
        raise UnsupportedFamily(f"{type(family).__name__} has no closed-form superpotential")
    return family.superpotential_derivative(k, x)


# --- spectrum table -------------------------------------------------------


@dataclass(frozen=True)
class DressedLevel:
    m: int
    epsilon: float
    e_minus: float
    e_plus: float


@dataclass(frozen=True)
class SpectrumTable:
    family: PotentialFamily
    omega_drive: float
    levels: tuple = field(default_factory=tuple)
    ground: float = 0.0

    def labelled(self):
        """``[(label, m, branch, value), ...]`` in emission order: ground, then per pair minus, plus."""
        rows = [("ground", None, None, self.ground)]
        for lev in self.levels:
            rows.append((f"m={lev.m}-", lev.m, Branch.MINUS, lev.e_minus))
            rows.append((f"m={lev.m}+", lev.m, Branch.PLUS, lev.e_plus))
        return rows

    def values(self) -> np.ndarray:
        return np.sort([row[3] for row in self.labelled()])


def spectrum_table(family: PotentialFamily, omega: float, n_pairs: int) -> SpectrumTable:
    """Ground level plus the first ``n_pairs`` dressed doublets."""
    omega = _check_drive(omega)
    n_pairs = _count(n_pairs, "n_pairs")
    family._check_level(n_pairs)
    levels = []
    for m in range(n_pairs):
        levels.append(
            DressedLevel(
                m,
                epsilon(family, m + 1),
                jc_eigenvalue(family, omega, m, Branch.MINUS),
                jc_eigenvalue(family, omega, m, Branch.PLUS),
            )
        )
    return SpectrumTable(family, omega, tuple(levels))
