"""Truncated matrices of B+, S, S^2 and H in the dressed product basis.

The two-channel basis is ordered ``[v_0, u_0, v_1, u_1, v_2, ..., u_N, v_{N+1}]``
(``N = n_max``), where ``v_n`` is the lower-channel bound state ``|n>`` and
``u_m`` the upper-channel state ``T|m>``. The reindexing operator ``T`` never
gets a matrix of its own; it lives entirely in the ``u`` labels.

``S`` couples ``u_m <-> v_{m+1}`` with strength ``sqrt(eps_{m+1})`` and
nothing else, so every ``(u_m, v_{m+1})`` pair is closed and truncation at
``n_max`` is exact: all ``2*n_max + 3`` eigenvalues of the truncated ``H``
are exact eigenvalues of the full operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import Branch, SpectrumTable, DressedLevel
from .linalg import eig_symmetric


@dataclass(frozen=True)
class DressedBasis:
    n_max: int

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 3

    @property
    def labels(self) -> tuple:
        out = ["v0"]
        for m in range(self.n_max + 1):
            out += [f"u{m}", f"v{m + 1}"]
        return tuple(out)

    @staticmethod
    def u(m: int) -> int:
        return 2 * m + 1

    @staticmethod
    def v(n: int) -> int:
        return 2 * n

    def pairs(self):
        """``(m, index of u_m, index of v_{m+1})`` for every closed pair."""
        return [(m, self.u(m), self.v(m + 1)) for m in range(self.n_max + 1)]


@dataclass(frozen=True)
class DressedMatrix:
    operator: str
    labels: tuple
    entries: np.ndarray

    @property
    def dim(self):
        return self.entries.shape[0]

    def block(self, indices) -> np.ndarray:
        idx = np.asarray(indices)
        return self.entries[np.ix_(idx, idx)]


def _frozen(a):
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


def _check(family, n_max):
    n_max = algebra._count(n_max, "n_max")
    family._check_level(n_max + 1)
    return n_max


def _sqrt_eps(family, n_max):
    return np.array([math.sqrt(algebra.epsilon(family, m + 1)) for m in range(n_max + 1)])


def b_plus_matrix(family, n_max: int) -> DressedMatrix:
    """Raising operator on ``|0> .. |n_max+1>``: ``B+|m> = sqrt(eps_{m+1}) |m+1>``."""
    n_max = _check(family, n_max)
    b = np.diag(_sqrt_eps(family, n_max), -1)
    return DressedMatrix("B+", tuple(str(n) for n in range(n_max + 2)), _frozen(b))


def s_matrix(family, n_max: int) -> DressedMatrix:
    n_max = _check(family, n_max)
    basis = DressedBasis(n_max)
    s = np.zeros((basis.dim, basis.dim))
    for (m, iu, iv), g in zip(basis.pairs(), _sqrt_eps(family, n_max)):
        s[iu, iv] = s[iv, iu] = g
    return DressedMatrix("S", basis.labels, _frozen(s))


def s2_matrix(family, n_max: int) -> DressedMatrix:
    """``S^2`` assembled directly from the levels (not by squaring ``S``)."""
    n_max = _check(family, n_max)
    basis = DressedBasis(n_max)
    diag = np.zeros(basis.dim)
    for m, iu, iv in basis.pairs():
        diag[iu] = diag[iv] = algebra.epsilon(family, m + 1)
    return DressedMatrix("S2", basis.labels, _frozen(np.diag(diag)))


def h_matrix(family, omega: float, n_max: int) -> DressedMatrix:
    """``H = S @ S + sqrt(hbar*Omega) * S``."""
    omega = algebra._check_drive(omega)
    s = s_matrix(family, n_max)
    h = s.entries @ s.entries + math.sqrt(family.hbar * omega) * s.entries
    return DressedMatrix("H", s.labels, _frozen(h))


def h_blocks(family, omega: float, n_max: int):
    """The 1x1 ground block followed by the 2x2 ``(u_m, v_{m+1})`` blocks of ``h_matrix``."""
    h = h_matrix(family, omega, n_max)
    basis = DressedBasis(n_max)
    blocks = [("v0", None, h.block([0]))]
    for m, iu, iv in basis.pairs():
        blocks.append((f"u{m},v{m + 1}", m, h.block([iu, iv])))
    return blocks


@dataclass(frozen=True)
class DressedState:
    m: int
    branch: Branch
    vector: np.ndarray


def dressed_states(family, n_max: int) -> list:
    """``(u_m +/- v_{m+1}) / sqrt(2)`` for ``m = 0..n_max``, minus before plus."""
    n_max = _check(family, n_max)
    basis = DressedBasis(n_max)
    out = []
    for m, iu, iv in basis.pairs():
        for branch in (Branch.MINUS, Branch.PLUS):
            vec = np.zeros(basis.dim)
            vec[iu] = 1.0 / math.sqrt(2.0)
            vec[iv] = branch.sign / math.sqrt(2.0)
            out.append(DressedState(m, branch, _frozen(vec)))
    return out


def commutator_diagonal(family, n_max: int):
    """Diagonal of ``[B-, B+]`` on ``|0> .. |n_max+1>``, split into trusted and edge parts.

    Returns ``(diag, edge)``: ``diag[m] = eps_{m+1} - eps_m`` for ``m <= n_max``;
    ``edge`` is the last entry, corrupted because ``B+`` maps ``|n_max+1>``
    out of the truncated space.
    """
    bp = b_plus_matrix(family, n_max).entries
    bm = bp.T
    full = np.diagonal(bm @ bp - bp @ bm)
    return full[:-1].copy(), float(full[-1])


def commutator_diagnostic(family, n_max: int) -> np.ndarray:
    return commutator_diagonal(family, n_max)[0]


@dataclass(frozen=True)
class DressedSpectrum:
    """Numerical spectrum of ``h_matrix`` paired with the closed-form labels."""

    table: SpectrumTable
    eigenvalues: np.ndarray
    labels: tuple
    analytic: np.ndarray
    max_deviation: float


def diagonalize_dressed(family, omega: float, n_max: int, method="householder") -> DressedSpectrum:
    """Diagonalize ``h_matrix`` and pair each eigenvalue with its ``(m, branch)`` label.

    Both lists are sorted and paired position by position, so degenerate
    values (e.g. every doublet at ``Omega = 0``) are matched by multiplicity.
    """
    h = h_matrix(family, omega, n_max)
    numeric = eig_symmetric(h.entries, method=method).values
    exact = algebra.spectrum_table(family, omega, n_max + 1)
    rows = exact.labelled()
    order = sorted(range(len(rows)), key=lambda i: (rows[i][3], i))
    analytic = np.array([rows[i][3] for i in order])
    labels = tuple(rows[i][0] for i in order)
    deviation = float(np.abs(numeric - analytic).max())

    by_label = dict(zip(labels, numeric))
    levels = tuple(
        DressedLevel(lev.m, lev.epsilon, float(by_label[f"m={lev.m}-"]), float(by_label[f"m={lev.m}+"]))
        for lev in exact.levels
    )
    table = SpectrumTable(family, exact.omega_drive, levels, ground=float(by_label["ground"]))
    return DressedSpectrum(table, numeric, labels, analytic, deviation)
