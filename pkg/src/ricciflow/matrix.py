"""Minimal dense real square-matrix kernel.

Matrices are plain float64 numpy arrays throughout the package, validated on
entry by :func:`as_square_matrix` (square shape, finite entries).  The row
index is the upper index of the frame-transformation convention: ``q[j, i]``
holds the j-th component of the i-th transformed frame vector.

Dimensions here are tiny (n <= 4 in practice), so the algorithms favour
simplicity and testability: Gauss-Jordan with partial pivoting for the
inverse, row-wise Gram-Schmidt for the triangular-times-orthogonal
factorization, and cyclic Jacobi rotations for the symmetric eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSymmetric, SingularMatrix

#: Pivot threshold for the singularity test, relative to the max-entry scale.
DEFAULT_SINGULARITY_TOL = 1e-12

_JACOBI_SWEEP_CAP = 100
_JACOBI_OFF_TOL = 1e-12


def as_square_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a float64 square matrix, rejecting non-finite entries."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        raise ValueError("empty matrix")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def inverse(m, singular_tol: float = DEFAULT_SINGULARITY_TOL) -> np.ndarray:
    """Invert ``m`` by Gauss-Jordan elimination with partial pivoting.

    Each pivot is tested against ``singular_tol`` times the max-entry scale of
    the input; a failing pivot raises :class:`SingularMatrix`, signalling a
    degenerate frame.
    """
    a = as_square_matrix(m)
    n = a.shape[0]
    scale = np.max(np.abs(a))
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    aug = np.hstack([a, np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[piv, col]) <= singular_tol * scale:
            raise SingularMatrix(f"pivot {aug[piv, col]:.3e} below threshold in column {col}")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0.0:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:].copy()


@dataclass(frozen=True)
class TriOrthFactors:
    """Factorization ``q = b @ u`` with ``b`` upper triangular (positive
    diagonal) and ``u`` orthogonal."""

    b: np.ndarray
    u: np.ndarray


def factor_tri_orth(q, singular_tol: float = DEFAULT_SINGULARITY_TOL) -> TriOrthFactors:
    """Factor an invertible ``q`` as ``b @ u``, triangular times orthogonal.

    The triangular factor sits on the *left*, so this is not the textbook QR:
    the rows of ``q`` are Gram-Schmidt orthonormalized from the last row
    upward (with one re-orthogonalization pass), which makes ``u``'s rows an
    orthonormal basis and the coefficient matrix ``b`` upper triangular.  The
    positive diagonal of ``b`` makes the factorization unique.
    """
    a = as_square_matrix(q)
    n = a.shape[0]
    scale = np.max(np.abs(a))
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    b = np.zeros((n, n))
    u = np.zeros((n, n))
    for i in range(n - 1, -1, -1):
        v = a[i].copy()
        for j in range(n - 1, i, -1):
            coef = v @ u[j]
            b[i, j] = coef
            v = v - coef * u[j]
        # second pass: restores orthogonality lost to cancellation
        for j in range(n - 1, i, -1):
            coef = v @ u[j]
            b[i, j] += coef
            v = v - coef * u[j]
        nrm = float(np.linalg.norm(v))
        if nrm <= singular_tol * scale:
            raise SingularMatrix(f"row {i} is linearly dependent on later rows")
        b[i, i] = nrm
        u[i] = v / nrm
    return TriOrthFactors(b=b, u=u)


def symmetric_eigen(s, symmetry_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, rotation)`` with ``values`` sorted descending and
    ``rotation`` orthogonal such that ``rotation.T @ s @ rotation`` is
    diagonal.  Rotations sweep all (p, q) pairs cyclically until the
    off-diagonal Frobenius norm drops below ``1e-12`` relative to the input
    scale, with a 100-sweep cap.  Eigenvector columns carry a fixed sign
    convention (largest-magnitude component positive) for reproducibility.
    """
    a0 = as_square_matrix(s)
    if np.max(np.abs(a0 - a0.T)) > symmetry_tol:
        raise NotSymmetric(f"max asymmetry {np.max(np.abs(a0 - a0.T)):.3e} exceeds {symmetry_tol:.1e}")
    n = a0.shape[0]
    a = 0.5 * (a0 + a0.T)
    rot = np.eye(n)
    off_tol = _JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(a)))
    for _ in range(_JACOBI_SWEEP_CAP):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                cth = 1.0 / math.sqrt(1.0 + t * t)
                sth = t * cth
                jrot = np.eye(n)
                jrot[p, p] = cth
                jrot[q, q] = cth
                jrot[p, q] = sth
                jrot[q, p] = -sth
                a = jrot.T @ a @ jrot
                a[p, q] = 0.0
                a[q, p] = 0.0
                rot = rot @ jrot
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    rot = rot[:, order]
    for col in range(n):
        k = int(np.argmax(np.abs(rot[:, col])))
        if rot[k, col] < 0.0:
            rot[:, col] = -rot[:, col]
    return values, rot


def is_upper_triangular(b) -> bool:
    """True when every strictly-lower entry is exactly zero."""
    a = np.asarray(b, dtype=float)
    return bool(np.all(a[np.tril_indices(a.shape[0], k=-1)] == 0.0))
