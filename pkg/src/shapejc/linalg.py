"""Dense real-symmetric eigenproblems.

Three backends sit behind :func:`eig_symmetric`:

``"householder"``
    In-package Householder tridiagonalization followed by implicit-shift QL
    iteration. Used for the small dressed-basis matrices so that the
    dressed cross-check does not lean on LAPACK.
``"lapack"``
    ``scipy.linalg.eigh`` on the dense array.
``"banded"``
    ``scipy.linalg.eig_banded`` on the extracted band for eigenvalues; any
    requested eigenvectors are recovered by shifted inverse iteration on the
    banded LU factor. Grid Hamiltonians have half-bandwidth 3, so this is
    O(n) memory traffic per vector instead of O(n^3).

``method="auto"`` picks householder for dim <= 64, banded when the matrix is
narrow compared with its dimension, and lapack otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch, EigensolverFailure

SYMMETRY_RTOL = 1e-12
QL_MAX_ITER = 60
EPS2 = np.finfo(float).eps ** 2
SAFMIN = np.finfo(float).tiny


class SymmetricDense:
    """Dense real symmetric matrix, symmetry checked on construction."""

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"need a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        scale = np.abs(a).max()
        asym = np.abs(a - a.T).max()
        if asym > SYMMETRY_RTOL * scale:
            raise ValueError(f"matrix is not symmetric: max |A - A^T| = {asym:.3e}")
        self._a = 0.5 * (a + a.T)
        self._a.flags.writeable = False
        self._bw = None

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._a

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    @property
    def half_bandwidth(self) -> int:
        if self._bw is None:
            rows, cols = np.nonzero(self._a)
            self._bw = int(np.abs(rows - cols).max()) if rows.size else 0
        return self._bw

    def band(self) -> np.ndarray:
        """Upper band storage as used by LAPACK ``?sbev`` (row ``b - k`` holds diagonal ``k``)."""
        b = self.half_bandwidth
        ab = np.zeros((b + 1, self.dim))
        for k in range(b + 1):
            ab[b - k, k:] = np.diagonal(self._a, k)
        return ab

    def max_abs(self) -> float:
        return float(np.abs(self._a).max())

    def __repr__(self):
        return f"SymmetricDense(dim={self.dim}, half_bandwidth={self.half_bandwidth})"


def as_symmetric(a) -> SymmetricDense:
    return a if isinstance(a, SymmetricDense) else SymmetricDense(a)


def matvec(a, x) -> np.ndarray:
    a = as_symmetric(a)
    x = np.asarray(x, dtype=float)
    if x.shape != (a.dim,):
        raise DimensionMismatch(f"matrix dim {a.dim} vs vector shape {x.shape}")
    return a.entries @ x


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray | None = None

    def residual(self, a) -> float:
        """``max |A V - V diag(values)|``."""
        a = np.asarray(as_symmetric(a))
        return float(np.abs(a @ self.vectors - self.vectors * self.values).max())

    def orthonormality_error(self) -> float:
        v = self.vectors
        return float(np.abs(v.T @ v - np.eye(v.shape[1])).max())


# --- in-package solver ----------------------------------------------------


def tridiagonalize(a, want_q=True):
    """Householder reduction ``Q^T A Q = T``.

    Returns ``(d, e, q)`` with ``d`` the diagonal, ``e`` the sub-diagonal
    (length n-1) and ``q`` the accumulated orthogonal factor (or ``None``).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    reflectors = []
    for k in range(n - 2):
        x = a[k + 1 :, k]
        sigma = np.abs(x).max()
        if sigma == 0.0:
            reflectors.append(None)
            continue
        xs = x / sigma
        alpha = np.linalg.norm(xs)
        if xs[0] > 0:
            alpha = -alpha
        v = xs.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # A <- P A P with P = I - 2 v v^T
        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1 :, k] = 0.0
        a[k, k + 1 :] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha * sigma
        reflectors.append(v)
    d = np.diagonal(a).copy()
    e = np.diagonal(a, -1).copy()
    q = None
    if want_q:
        q = np.eye(n)
        for k in reversed(range(len(reflectors))):
            v = reflectors[k]
            if v is None:
                continue
            blk = q[k + 1 :, k + 1 :]
            blk -= 2.0 * np.outer(v, v @ blk)
    return d, e, q


def tridiagonal_ql(d, e, z=None, max_iter=QL_MAX_ITER):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    An off-diagonal ``e_m`` is deflated once ``e_m**2 <= eps**2*|d_m*d_{m+1}| + tiny``
    (the LAPACK ``?steqr`` test), so input should be scaled to order one.

    ``d`` (diagonal) and ``e`` (sub-diagonal, length n-1) are not modified.
    If ``z`` is given its columns are rotated along with the iteration, so
    passing the Householder ``Q`` yields eigenvectors of the original matrix.
    Returns ``(values, z)`` unsorted.
    """
    d = np.array(d, dtype=float)
    n = d.size
    e = np.append(np.asarray(e, dtype=float), 0.0)
    if z is not None:
        z = np.array(z, dtype=float)
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if e[m] * e[m] <= EPS2 * abs(d[m]) * abs(d[m + 1]) + SAFMIN:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise ConvergenceFailure(l, it)
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi = z[:, i].copy()
                    z[:, i] = c * zi - s * z[:, i + 1]
                    z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z


def _householder_ql(a, want_vectors):
    # power-of-two scaling is exact and keeps reflector norms away from underflow
    peak = np.abs(a).max()
    scale = math.ldexp(1.0, math.frexp(peak)[1]) if peak > 0 else 1.0
    d, e, q = tridiagonalize(a / scale, want_q=want_vectors)
    values, vectors = tridiagonal_ql(d, e, q)
    values = values * scale
    order = np.argsort(values, kind="stable")
    values = values[order]
    if vectors is not None:
        vectors = vectors[:, order]
    return values, vectors


# --- LAPACK-backed paths --------------------------------------------------


def _lapack(a, want_vectors, select):
    kw = {}
    if select is not None:
        kind, lo, hi = select
        kw["subset_by_index" if kind == "index" else "subset_by_value"] = (lo, hi)
    try:
        out = scipy.linalg.eigh(a, eigvals_only=not want_vectors, driver="evr", **kw)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return (out, None) if not want_vectors else out


def _inverse_iteration(ab_full, b, lam, shift_scale, previous=(), n_iter=4):
    """Eigenvector for (already accurate) eigenvalue ``lam`` by shifted inverse iteration.

    ``ab_full`` is the general band storage of A (``b`` sub- and super-diagonals).
    ``previous`` holds vectors of nearby eigenvalues to orthogonalize against.
    """
    n = ab_full.shape[1]
    shifted = ab_full.copy()
    # perturb the shift off the eigenvalue so the factor stays nonsingular
    sigma = lam + 64 * np.finfo(float).eps * shift_scale
    shifted[b] -= sigma
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(n_iter):
        v = scipy.linalg.solve_banded((b, b), shifted, v, check_finite=False)
        for u in previous:
            v -= (u @ v) * u
        v /= np.linalg.norm(v)
    return v


def _banded(a: SymmetricDense, want_vectors, select):
    b = a.half_bandwidth
    ab = a.band()
    kw = {}
    if select is not None:
        kind, lo, hi = select
        kw = {"select": "i" if kind == "index" else "v", "select_range": (lo, hi)}
    try:
        values = scipy.linalg.eig_banded(ab, lower=False, eigvals_only=True, **kw)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    values = np.sort(values)
    if not want_vectors:
        return values, None
    full = np.zeros((2 * b + 1, a.dim))
    full[: b + 1] = ab
    for k in range(1, b + 1):
        full[b + k, : a.dim - k] = np.diagonal(a.entries, -k)
    scale = max(a.max_abs(), 1.0)
    cluster_tol = 1e-3 * scale
    vectors = np.empty((a.dim, values.size))
    for j, lam in enumerate(values):
        near = [vectors[:, i] for i in range(j) if abs(values[i] - lam) < cluster_tol]
        vectors[:, j] = _inverse_iteration(full, b, lam, scale, near)
    return values, vectors


def _canonical_signs(vectors):
    # make the largest-magnitude component of each column positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_symmetric(a, want_vectors=False, *, select=None, method="auto") -> EigenDecomposition:
    """Eigenvalues (ascending) and optionally orthonormal eigenvectors of symmetric ``a``.

    Parameters
    ----------
    a : array_like or SymmetricDense
    want_vectors : bool
    select : tuple, optional
        ``("index", lo, hi)`` for eigenvalues ``lo..hi`` inclusive (0-based),
        or ``("value", lo, hi)`` for eigenvalues in the half-open interval
        ``(lo, hi]``. Not supported by the householder backend.
    method : {"auto", "householder", "lapack", "banded"}

    Results are deterministic for identical input; eigenvector signs are
    fixed so that each column's largest-magnitude entry is positive.
    """
    a = as_symmetric(a)
    if method == "auto":
        if a.dim <= 64 and select is None:
            method = "householder"
        elif a.dim >= 256 and a.half_bandwidth <= a.dim // 32:
            method = "banded"
        else:
            method = "lapack"
    if method == "householder":
        if select is not None:
            raise ValueError("householder backend computes the full spectrum only")
        values, vectors = _householder_ql(a.entries, want_vectors)
    elif method == "lapack":
        values, vectors = _lapack(a.entries, want_vectors, select)
    elif method == "banded":
        values, vectors = _banded(a, want_vectors, select)
    else:
        raise ValueError(f"unknown method {method!r}")
    values = np.asarray(values, dtype=float)
    if vectors is not None:
        vectors = _canonical_signs(np.asarray(vectors, dtype=float))
    return EigenDecomposition(values, vectors)
