"""Finite-difference check of the closed-form spectra in position space.

Operators are discretized on the interior points of ``[x_min, x_max]`` with
Dirichlet walls. With ``c = hbar/sqrt(2M)``:

* ``A = W + c*D1`` with ``D1`` the antisymmetric 2-point central difference,
  so ``A^dagger`` is exactly ``A.T``;
* ``A^dagger A -> -c^2*D2 + W^2 - c*W'`` and ``A A^dagger -> -c^2*D2 + W^2 + c*W'``
  with ``D2`` the 3-point second difference and ``W, W'`` evaluated analytically.

The two-channel matrix interleaves ``(upper_i, lower_i)`` per grid point::

    H = [[A A^dagger,          sqrt(hbar*Omega) A],
         [sqrt(hbar*Omega) A^T, A^dagger A       ]]

so its half-bandwidth is 3.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import algebra
from .algebra import Branch, HarmonicOscillator, Morse
from .errors import GridTooCoarse, MatchFailure, UnsupportedFamily
from .linalg import SymmetricDense, eig_symmetric

MIN_POINTS = 50
TAIL_CUTOFF = 1e-8
WALL_FACTOR = 50.0
ERROR_FLOOR = 1e-11
HO_SPACING = 0.01


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max) and self.x_min < self.x_max):
            raise ValueError(f"need finite x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points:
            raise ValueError(f"n_points must be an integer, got {self.n_points!r}")
        if self.n_points < MIN_POINTS:
            raise GridTooCoarse(f"n_points = {self.n_points} < {MIN_POINTS}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(1, self.n_points + 1)

    def refine(self, factor: int = 2) -> "GridSpec":
        """Same domain, spacing divided by ``factor``."""
        return GridSpec(self.x_min, self.x_max, factor * (self.n_points + 1) - 1)


def _require_grid_family(family):
    if not getattr(family, "grid_supported", False):
        raise UnsupportedFamily(f"{type(family).__name__} is an analytic-only family")


def _c(family):
    return family.hbar / math.sqrt(2.0 * family.mass)


def _targets(family, omega, n_levels):
    """First ``n_levels`` of: ground, then (m, minus), (m, plus) for m = 0, 1, ..."""
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    n_pairs = n_levels // 2  # pairs fully or partly needed beyond the ground level
    count = algebra.level_count(family)
    if n_pairs > count:
        available = 1 + 2 * int(count)
        raise MatchFailure(
            f"{n_levels} levels requested but only {available} analytic levels are bound "
            f"(ground plus {int(count)} dressed pairs)"
        )
    rows = algebra.spectrum_table(family, omega, n_pairs).labelled()[:n_levels]
    return rows


def default_grid(family, n_levels: int = 5, omega: float = 0.0) -> GridSpec:
    """Domain sized so the walls do not disturb the levels a verification uses.

    Oscillator: symmetric, half-width ``8*sqrt(hbar/(M*omega))*sqrt(n_levels)``,
    spacing 0.01 oscillator lengths. Morse: left wall where
    ``V0*exp(-2*lam*x)`` exceeds 50x the highest target energy, right wall where the slowest bound tail involved
    has fallen below 1e-8; both rounded outward to multiples of ``0.5/lam``;
    1000 points.
    """
    _require_grid_family(family)
    if isinstance(family, HarmonicOscillator):
        length = math.sqrt(family.hbar / (family.mass * family.omega))
        half = 8.0 * length * math.sqrt(max(n_levels, 1))
        return GridSpec(-half, half, math.ceil(2.0 * half / (HO_SPACING * length)))
    rows = _targets(family, omega, n_levels)
    e_top = max(max(r[3] for r in rows), algebra.remainder(family, 1))
    x_min = -math.log(max(WALL_FACTOR * e_top / family.v0, 1.0)) / (2.0 * family.lam)
    m_max = max((r[1] for r in rows if r[1] is not None), default=-1)
    a_slow = family.a(m_max + 2)
    x_max = math.log(1.0 / TAIL_CUTOFF) * _c(family) / a_slow
    unit = 0.5 / family.lam
    return GridSpec(math.floor(x_min / unit) * unit, math.ceil(x_max / unit) * unit, 1000)


# --- operator pieces ------------------------------------------------------


def _second_difference(n, h):
    d2 = np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    return d2 / (h * h)


def _first_difference(n, h):
    return (np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / (2.0 * h)


def lowering_matrix(family, k: int, grid: GridSpec) -> np.ndarray:
    """Discretized ``A(a_k) = W(x; a_k) + c*D1``; its transpose is ``A^dagger``."""
    _require_grid_family(family)
    w = algebra.superpotential(family, k, grid.x)
    return np.diag(w) + _c(family) * _first_difference(grid.n_points, grid.h)


def _partner_matrix(family, k, grid, sign):
    x = grid.x
    c = _c(family)
    w = algebra.superpotential(family, k, x)
    dw = algebra.superpotential_derivative(family, k, x)
    return -c * c * _second_difference(grid.n_points, grid.h) + np.diag(w * w + sign * c * dw)


@dataclass(frozen=True)
class GridHamiltonian:
    grid: GridSpec
    channels: int
    matrix: SymmetricDense
    family: object = None
    omega: float = 0.0

    def channel_slices(self):
        """Index slices of the upper and lower channel (two-channel builds only)."""
        return slice(0, None, 2), slice(1, None, 2)


def build_single_channel(family, k: int, grid: GridSpec, partner: str = "lower") -> GridHamiltonian:
    """``A^dagger A`` (``partner="lower"``) or ``A A^dagger`` (``"upper"``) at chain index ``k``."""
    _require_grid_family(family)
    if partner not in ("lower", "upper"):
        raise ValueError("partner must be 'lower' or 'upper'")
    mat = _partner_matrix(family, k, grid, -1.0 if partner == "lower" else 1.0)
    return GridHamiltonian(grid, 1, SymmetricDense(mat), family)


def build_two_channel(family, omega: float, grid: GridSpec) -> GridHamiltonian:
    _require_grid_family(family)
    omega = algebra._check_drive(omega)
    n = grid.n_points
    g = math.sqrt(family.hbar * omega)
    h = np.zeros((2 * n, 2 * n))
    h[0::2, 0::2] = _partner_matrix(family, 1, grid, 1.0)
    h[1::2, 1::2] = _partner_matrix(family, 1, grid, -1.0)
    a = lowering_matrix(family, 1, grid)
    h[0::2, 1::2] = g * a
    h[1::2, 0::2] = g * a.T
    return GridHamiltonian(grid, 2, SymmetricDense(h), family, omega)


# --- verification ---------------------------------------------------------


@dataclass(frozen=True)
class LevelCheck:
    label: str
    m: int | None
    branch: Branch | None
    analytic: float
    numeric: float
    abs_error: float
    rel_error: float


@dataclass(frozen=True)
class VerificationReport:
    family: object
    omega: float
    grid: GridSpec
    levels: tuple
    ground_leakage: float
    convergence_ratio: float = float("nan")

    @property
    def max_rel_error(self) -> float:
        return max(lev.rel_error for lev in self.levels)

    @property
    def max_abs_error(self) -> float:
        return max(lev.abs_error for lev in self.levels)

    def passes(self, tolerance: float = 1e-3) -> bool:
        return all(lev.rel_error <= tolerance for lev in self.levels)


def _energy_unit(family):
    return algebra.remainder(family, 1)


def _match(family, omega, grid, n_levels, margin, want_leakage):
    rows = _targets(family, omega, n_levels)
    analytic = np.array([r[3] for r in rows])
    scale = family.hbar * omega + _energy_unit(family)
    lo = analytic.min() - margin * scale
    hi = analytic.max() + margin * scale
    ham = build_two_channel(family, omega, grid)
    values = eig_symmetric(ham.matrix, select=("value", lo, hi)).values
    if values.size < n_levels:
        raise MatchFailure(
            f"only {values.size} numerical eigenvalues in [{lo:.6g}, {hi:.6g}] "
            f"for {n_levels} analytic levels"
        )
    cost = np.abs(analytic[:, None] - values[None, :])
    _, cols = linear_sum_assignment(cost)
    numeric = values[cols]

    unit = _energy_unit(family)
    checks = []
    for r, a, x in zip(rows, analytic, numeric):
        err = abs(x - a)
        checks.append(LevelCheck(r[0], r[1], r[2], float(a), float(x), float(err),
                                 float(err / (abs(a) if a != 0 else unit))))
    leakage = float("nan")
    if want_leakage:
        lam0 = numeric[0]  # rows[0] is always the ground level
        gap = np.sort(np.abs(values - lam0))[1] if values.size > 1 else scale
        window = 0.5 * gap
        vec = eig_symmetric(ham.matrix, True, select=("value", lam0 - window, lam0 + window)).vectors
        upper, _ = ham.channel_slices()
        leakage = float(np.sum(vec[upper, 0] ** 2))
    return tuple(checks), leakage


def verify_spectrum(family, omega: float, grid: GridSpec | None = None, n_levels: int = 5,
                    *, margin: float = 0.5, refine_check: bool = True) -> VerificationReport:
    """Compare two-channel grid eigenvalues with the closed-form dressed levels.

    Analytic targets are the ground level and then each doublet, minus before
    plus, truncated to ``n_levels``. Numerical eigenvalues are taken from a
    window ``margin*(hbar*Omega + R(a_1))`` around the targets (box states of
    the Dirichlet domain above dissociation may lie inside it) and paired to
    the targets by minimum total distance, which also handles degenerate
    doublets. ``rel_error`` of a zero-valued level is its absolute error
    divided by ``R(a_1)``.

    ``ground_leakage`` is the upper-channel weight of the eigenvector paired
    with the ground level. ``convergence_ratio`` is the ratio of the largest
    absolute error on ``grid`` to that on ``grid.refine()`` (about 4 for a
    second-order scheme); it is only computed when ``refine_check`` is set.
    """
    _require_grid_family(family)
    omega = algebra._check_drive(omega)
    if grid is None:
        grid = default_grid(family, n_levels, omega)
    checks, leakage = _match(family, omega, grid, n_levels, margin, want_leakage=True)
    ratio = float("nan")
    if refine_check:
        fine, _ = _match(family, omega, grid.refine(), n_levels, margin, want_leakage=False)
        coarse_err = max(c.abs_error for c in checks)
        fine_err = max(c.abs_error for c in fine)
        ratio = coarse_err / fine_err if fine_err > 0 else float("inf")
    return VerificationReport(family, omega, grid, checks, leakage, ratio)


@dataclass(frozen=True)
class ConvergenceStudy:
    reports: tuple
    orders: np.ndarray  # (n_refinements, n_levels); nan where below the error floor
    floor: float = ERROR_FLOOR

    @property
    def rows(self):
        """``[(h, max_rel_error), ...]`` coarse to fine."""
        return [(r.grid.h, r.max_rel_error) for r in self.reports]

    @property
    def order(self) -> np.ndarray:
        """Empirical order of the largest error between successive grids."""
        errs = np.array([r.max_abs_error for r in self.reports])
        return np.log2(errs[:-1] / errs[1:])

    def tracked_orders(self) -> np.ndarray:
        return self.orders[np.isfinite(self.orders)]


def convergence_study(family, omega: float, grid: GridSpec | None = None, n_levels: int = 5,
                      n_refinements: int = 2, floor: float = ERROR_FLOOR) -> ConvergenceStudy:
    """Rerun :func:`verify_spectrum` at ``h, h/2, ..., h/2**n_refinements`` on the same domain.

    Per-level order ``p = log2(err(h)/err(h/2))``; levels whose error is
    already under ``floor`` on either grid are left out (``nan``).
    """
    _require_grid_family(family)
    if grid is None:
        grid = default_grid(family, n_levels, omega)
    reports = []
    g = grid
    for _ in range(n_refinements + 1):
        reports.append(verify_spectrum(family, omega, g, n_levels, refine_check=False))
        g = g.refine()
    errs = np.array([[lev.abs_error for lev in r.levels] for r in reports])
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(errs[:-1] / errs[1:])
    orders[(errs[:-1] < floor) | (errs[1:] < floor)] = np.nan
    return ConvergenceStudy(tuple(reports), orders, floor)


# --- shape-invariance check ----------------------------------------------


def gaussian_probe(grid: GridSpec) -> np.ndarray:
    """Unit-norm Gaussian centred mid-domain with FWHM one tenth of the domain."""
    x = grid.x
    centre = 0.5 * (grid.x_min + grid.x_max)
    fwhm = (grid.x_max - grid.x_min) / 10.0
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    g = np.exp(-0.5 * ((x - centre) / sigma) ** 2)
    return g / np.linalg.norm(g)


def shape_invariance_residual(family, grid: GridSpec | None = None, *, remainder_shift: float = 0.0) -> float:
    """``|| (A(a1) A(a1)^T - A(a2)^T A(a2) - R(a1)) g ||`` for a unit Gaussian ``g``.

    Both products are formed from the discretized first-order operators, so
    the kinetic parts cancel identically and what remains is the O(h^2)
    error of the discrete commutator ``[D1, W]``. ``remainder_shift`` is
    added to ``R(a1)``; a shift of 1 should give a residual near 1.
    """
    _require_grid_family(family)
    if grid is None:
        grid = default_grid(family)
    g = gaussian_probe(grid)
    a1 = lowering_matrix(family, 1, grid)
    a2 = lowering_matrix(family, 2, grid)
    r = algebra.remainder(family, 1) + remainder_shift
    res = a1 @ (a1.T @ g) - a2.T @ (a2 @ g) - r * g
    return float(np.linalg.norm(res))


# --- eigenvector dump -----------------------------------------------------


def _plain(x):
    return np.format_float_positional(float(x), precision=12, unique=False, fractional=False, trim="-")


def write_states_csv(ham: GridHamiltonian, stream, k: int = 3):
    """Write the lowest ``k`` eigenvectors as ``x,channel,state_0..state_{k-1}``.

    ``channel`` is 0 for the upper and 1 for the lower component (always 0 for
    single-channel builds). Vectors have unit Euclidean norm.
    """
    dec = eig_symmetric(ham.matrix, True, select=("index", 0, k - 1))
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "channel"] + [f"state_{j}" for j in range(k)])
    x = ham.grid.x
    for i, xi in enumerate(x):
        for ch in range(ham.channels):
            row = dec.vectors[i * ham.channels + ch]
            writer.writerow([_plain(xi), ch] + [_plain(v) for v in row])
    return dec.values
