"""Subspace arithmetic on top of SVD.

All rank decisions use one policy: singular values below ``tol * s_max``
are treated as zero.  Bases are returned as matrices whose *columns* are
orthonormal; the empty subspace is an ``(n, 0)`` matrix.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return a


def orth_basis(a, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal basis of the column space of ``a``."""
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0))
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def null_basis(a, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal basis of the null space of ``a`` (columns)."""
    a = as_matrix(a)
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].T


def numerical_rank(a, tol: float = 1e-6) -> int:
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def intersect_subspaces(b1, b2, tol: float = 1e-6) -> np.ndarray:
    """Basis of ``span(b1) & span(b2)``.

    Computed as the null space of the stacked orthogonal-complement
    projectors: x lies in both spans iff both ``(I - P_i) x`` vanish.
    """
    b1 = orth_basis(b1, tol)
    b2 = orth_basis(b2, tol)
    n = b1.shape[0]
    stacked = np.vstack([
        np.eye(n) - b1 @ b1.T,
        np.eye(n) - b2 @ b2.T,
    ])
    return null_basis(stacked, tol)


def span_residual(v, basis) -> float:
    """Sine of the angle between ``v`` and ``span(basis)``; 0 for tiny v."""
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv < 1e-13:
        return 0.0
    basis = as_matrix(basis)
    if basis.shape[1] == 0:
        return 1.0
    rem = v - basis @ (basis.T @ v)
    return float(np.linalg.norm(rem) / nv)


def max_span_residual(vectors, basis) -> float:
    """Largest ``span_residual`` over the columns of ``vectors``."""
    vectors = as_matrix(vectors)
    if vectors.shape[1] == 0:
        return 0.0
    return max(span_residual(vectors[:, j], basis) for j in range(vectors.shape[1]))


def subspace_max_angle(b1, b2) -> float:
    """Largest principal angle (radians) between two subspaces.

    Returns pi/2 when the dimensions differ, since the subspaces cannot
    then be equal.
    """
    b1 = as_matrix(b1)
    b2 = as_matrix(b2)
    if b1.shape[1] != b2.shape[1]:
        return float(np.pi / 2)
    if b1.shape[1] == 0:
        return 0.0
    angles = scipy.linalg.subspace_angles(b1, b2)
    return float(np.max(angles)) if angles.size else 0.0


def solve_min_norm(a, b) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of ``a x = b`` and its residual."""
    a = as_matrix(a)
    b = np.asarray(b, dtype=float)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.linalg.norm(a @ x - b))
    return x, resid
