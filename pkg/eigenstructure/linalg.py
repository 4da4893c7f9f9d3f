# eigenstructure/linalg.py
"""
Tolerance-aware dense linear algebra and subspace algebra.

Matrices are plain 2-D numpy arrays (row-major). Real inputs stay float64,
complex inputs are complex128; ``is_real`` decides when a complex result may
be returned as real. Every rank decision goes through ``rank_of`` so that the
whole toolkit shares one threshold convention.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import AmbientMismatch, DimensionMismatch, NonFiniteEntry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tol:
    """
    Rank and residual thresholds.

    ``rel`` scales the singular-value cut-off, ``abs`` bounds residuals of
    containment and identity checks.
    """
    rel: float = 1e-11
    abs: float = 1e-8

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError("Tol.rel must be positive.")
        if not self.abs >= 0:
            raise ValueError("Tol.abs must be nonnegative.")


DEFAULT_TOL = Tol()


def as_matrix(M, rows=None, cols=None, name='matrix'):
    """
    Validates M as a finite 2-D array and returns it as float64 or complex128.
    """
    arr = np.asarray(M)
    if arr.ndim == 1 and arr.size == 0 and rows is not None:
        arr = arr.reshape(rows, 0 if cols is None else cols)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {arr.shape}.")
    if rows is not None and arr.shape[0] != rows:
        raise DimensionMismatch(f"{name} must have {rows} rows, got {arr.shape[0]}.")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionMismatch(f"{name} must have {cols} columns, got {arr.shape[1]}.")
    dtype = complex if np.iscomplexobj(arr) else float
    arr = np.array(arr, dtype=dtype)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"{name} contains NaN or infinite entries.")
    return arr


def is_real(M, tol=DEFAULT_TOL):
    """
    True when the largest imaginary magnitude of M is within tol.abs.
    """
    M = np.asarray(M)
    if not np.iscomplexobj(M) or M.size == 0:
        return True
    return float(np.max(np.abs(M.imag))) <= tol.abs


def _singular_values(M):
    if M.size == 0:
        return np.zeros(0)
    return scipy.linalg.svd(M, compute_uv=False)


def _rank_from(s, shape, tol, scale=None):
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else scale
    if ref <= 0:
        return 0
    threshold = tol.rel * ref * max(shape)
    return int(np.count_nonzero(s > threshold))


def rank_of(M, tol=DEFAULT_TOL, scale=None):
    """
    Numerical rank: the number of singular values above
    tol.rel * sigma_1 * max(rows, cols).

    ``scale`` replaces sigma_1 when the caller knows the magnitude of the map
    that produced M; this keeps a numerically-zero product at rank 0.
    """
    M = np.asarray(M)
    return _rank_from(_singular_values(M), M.shape, tol, scale)


class Subspace:
    """
    A linear subspace of R^n or C^n held as an orthonormal basis matrix.

    The zero subspace is a regular value with a basis of shape (n, 0).
    Instances are immutable; build them with the module functions or the
    classmethods below.
    """

    __slots__ = ('_basis',)

    def __init__(self, basis):
        basis = np.array(basis, dtype=complex if np.iscomplexobj(basis) else float)
        if basis.ndim != 2:
            raise DimensionMismatch("A subspace basis must be a 2-D array.")
        if basis.shape[1] > basis.shape[0]:
            raise DimensionMismatch("A subspace basis cannot have more columns than rows.")
        basis.setflags(write=False)
        self._basis = basis

    @classmethod
    def zero(cls, n, dtype=float):
        return cls(np.zeros((n, 0), dtype=dtype))

    @classmethod
    def full(cls, n):
        return cls(np.eye(n))

    @property
    def basis(self):
        return self._basis

    @property
    def ambient_dim(self):
        return self._basis.shape[0]

    @property
    def dim(self):
        return self._basis.shape[1]

    @property
    def is_zero(self):
        return self.dim == 0

    @property
    def is_full(self):
        return self.dim == self.ambient_dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _check_ambient(U, V):
    if U.ambient_dim != V.ambient_dim:
        raise AmbientMismatch(
            f"Subspaces live in different spaces ({U.ambient_dim} vs {V.ambient_dim})."
        )


def kernel_basis(M, tol=DEFAULT_TOL, scale=None):
    """
    Orthonormal basis of ker M; its dimension is cols - rank_of(M).
    """
    M = np.asarray(M)
    rows, cols = M.shape
    if M.size == 0:
        return Subspace(np.eye(cols, dtype=M.dtype if cols else float))
    _, s, vh = scipy.linalg.svd(M, full_matrices=True)
    r = _rank_from(s, M.shape, tol, scale)
    return Subspace(vh[r:].conj().T)


def image_basis(M, tol=DEFAULT_TOL, scale=None):
    """
    Orthonormal basis of the column space of M; its dimension is rank_of(M).
    """
    M = np.asarray(M)
    rows, cols = M.shape
    if M.size == 0:
        return Subspace(np.zeros((rows, 0), dtype=M.dtype))
    u, s, _ = scipy.linalg.svd(M, full_matrices=False)
    r = _rank_from(s, M.shape, tol, scale)
    return Subspace(u[:, :r])


def orthogonal_complement(U, tol=DEFAULT_TOL):
    """
    Orthonormal basis of the orthogonal complement of U in its ambient space.
    """
    if U.is_zero:
        return Subspace.full(U.ambient_dim)
    if U.is_full:
        return Subspace.zero(U.ambient_dim)
    return kernel_basis(U.basis.conj().T, tol, scale=1.0)


def pinv(M, tol=DEFAULT_TOL):
    """
    Moore-Penrose pseudo-inverse through a rank-truncated SVD.
    """
    M = np.asarray(M)
    rows, cols = M.shape
    if M.size == 0:
        return np.zeros((cols, rows), dtype=M.dtype)
    u, s, vh = scipy.linalg.svd(M, full_matrices=False)
    r = _rank_from(s, M.shape, tol)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def projector_residual(U, M):
    """
    Largest column norm of M after removing its component in U.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    R = M - U.basis @ (U.basis.conj().T @ M)
    return float(np.max(np.linalg.norm(R, axis=0)))


def subspace_sum(U, V, tol=DEFAULT_TOL):
    _check_ambient(U, V)
    if U.is_zero:
        return V
    if V.is_zero:
        return U
    return image_basis(np.hstack([U.basis, V.basis]), tol, scale=1.0)


def subspace_intersect(U, V, tol=DEFAULT_TOL):
    """
    U ∩ V from the kernel of [U, -V]; the dimension obeys
    dim(U + V) + dim(U ∩ V) = dim U + dim V under the same tol.
    """
    _check_ambient(U, V)
    if U.is_zero or V.is_zero:
        dtype = complex if (np.iscomplexobj(U.basis) or np.iscomplexobj(V.basis)) else float
        return Subspace.zero(U.ambient_dim, dtype)
    K = kernel_basis(np.hstack([U.basis, -V.basis]), tol, scale=1.0)
    if K.is_zero:
        return Subspace.zero(U.ambient_dim, K.basis.dtype)
    X = U.basis @ K.basis[:U.dim]
    q, _ = scipy.linalg.qr(X, mode='economic')
    return Subspace(q)


def preimage(M, S, tol=DEFAULT_TOL):
    """
    M^{-1} S = {x : M x ∈ S}, computed as the kernel of P_perp(S) M.
    """
    M = np.asarray(M)
    if M.shape[0] != S.ambient_dim:
        raise DimensionMismatch(
            f"Map has {M.shape[0]} rows but the subspace lives in R^{S.ambient_dim}."
        )
    cols = M.shape[1]
    if S.is_full or M.size == 0:
        return Subspace.full(cols)
    projected = M - S.basis @ (S.basis.conj().T @ M)
    scale = float(np.linalg.norm(M, 2))
    return kernel_basis(projected, tol, scale=scale)


def contains(U, V, tol=DEFAULT_TOL):
    """
    True when every basis vector of V lies in U up to tol.abs.
    """
    _check_ambient(U, V)
    if V.is_zero:
        return True
    if U.is_zero:
        return False
    return projector_residual(U, V.basis) <= tol.abs


def equals(U, V, tol=DEFAULT_TOL):
    return U.dim == V.dim and contains(U, V, tol) and contains(V, U, tol)


def subspace_distance(U, V):
    """
    Symmetric residual max(res(U ⊇ V), res(V ⊇ U)); zero for equal subspaces.
    """
    _check_ambient(U, V)
    if U.dim != V.dim:
        return float('inf')
    if U.is_zero:
        return 0.0
    return max(projector_residual(U, V.basis), projector_residual(V, U.basis))


def image_of(M, S, tol=DEFAULT_TOL):
    """
    M S, with the rank threshold scaled by the norm of M.
    """
    M = np.asarray(M)
    if S.is_zero or M.size == 0:
        return Subspace.zero(M.shape[0])
    return image_basis(M @ S.basis, tol, scale=max(float(np.linalg.norm(M, 2)), 1e-300))
