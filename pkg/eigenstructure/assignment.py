# eigenstructure/assignment.py
"""
Eigenstructure assignment: which eigenvector sets a real state feedback can
produce, the subspace K_h they span for a given spectrum, and the smallest
number of distinct eigenvalues that makes K_h as large as it can get.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    DependentSelection,
    InputError,
    NonDiagonalInput,
    NumericalError,
)
from .feedback import COND_WARN, Assigned, synthesize
from .geometry import (
    friend_of,
    krylov_chain,
    reachability_on,
    reachable_subspace,
    sstar_sequence,
    vstar,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    as_matrix,
    image_basis,
    projector_residual,
    rank_of,
    subspace_intersect,
)
from .pencils import (
    REACHABILITY,
    ROSENBROCK,
    invariant_zeros,
    rosenbrock_kernel,
    reach_pencil_kernel,
    uncontrollable_eigenvalues,
    validate_spectrum,
)

logger = logging.getLogger(__name__)

MODES = (REACHABILITY, ROSENBROCK)
# Relative distance below which two eigenvalues count as a close pair.
DIVIDED_DIFFERENCE_GAP = 1e-2


@dataclass(frozen=True)
class MooreReport:
    """
    The three conditions under which a real F with the given eigenpairs exists.
    """
    independent: bool
    self_conjugate: bool
    conjugate_failures: tuple
    membership_failures: tuple

    @property
    def ok(self):
        return self.independent and not self.conjugate_failures and not self.membership_failures


def moore_check(A, B, candidates, tol=DEFAULT_TOL):
    """
    Checks a list of (λ, v) against: independence of the v, conjugate λ
    carrying conjugate v, and (A - λI) v ∈ im B.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    lams = [complex(lam) for lam, _ in candidates]
    vecs = [np.asarray(v).reshape(-1) for _, v in candidates]
    if vecs:
        stacked = np.column_stack([v / max(np.linalg.norm(v), 1e-300) for v in vecs])
        independent = rank_of(stacked, tol, scale=1.0) == len(vecs)
    else:
        independent = True
    self_conjugate = True
    conjugate_failures = []
    for i, (lam, v) in enumerate(zip(lams, vecs)):
        scale = tol.abs * max(1.0, abs(lam))
        if abs(lam.imag) <= scale:
            if np.max(np.abs(v.imag), initial=0.0) > tol.abs * max(1.0, np.linalg.norm(v)):
                conjugate_failures.append(i)
            continue
        partners = [j for j, other in enumerate(lams) if abs(other - lam.conjugate()) <= scale]
        if not partners:
            self_conjugate = False
            conjugate_failures.append(i)
        elif np.linalg.norm(vecs[partners[0]] - v.conj()) > tol.abs * max(1.0, np.linalg.norm(v)):
            conjugate_failures.append(i)
    image_B = image_basis(B, tol)
    membership_failures = []
    for i, (lam, v) in enumerate(zip(lams, vecs)):
        residual = projector_residual(image_B, ((A - lam * np.eye(n)) @ v).reshape(-1, 1))
        if residual > tol.abs * max(1.0, np.linalg.norm(A - lam * np.eye(n), 2) * np.linalg.norm(v)):
            membership_failures.append(i)
    return MooreReport(
        independent=independent,
        self_conjugate=self_conjugate,
        conjugate_failures=tuple(conjugate_failures),
        membership_failures=tuple(membership_failures),
    )


def synthesize_feedback(A, B, selection, tol=DEFAULT_TOL, C=None, D=None, cond_warn=COND_WARN):
    """
    Real F from a selection of (PencilKernel, coefficients) pairs; every
    coefficient column picks one eigenvector v = V c with input w = W c.
    """
    entries = []
    for kernel, coefficients in selection:
        V, W = kernel.columns(coefficients)
        for k in range(V.shape[1]):
            entries.append(Assigned(kernel.lam, V[:, k], W[:, k]))
    if not entries:
        raise DependentSelection("The selection is empty.")
    return synthesize(A, B, entries, tol, C=C, D=D, cond_warn=cond_warn)


@dataclass(frozen=True, eq=False)
class KhResult:
    """
    K_h = span of the state parts of the pencil kernels at the h eigenvalues.
    """
    Kh: Subspace
    kernels: tuple
    spectrum: object
    mode: str

    @property
    def rank(self):
        return kernel_rank(self.kernels)


def _align(N, M):
    """
    Unitary Q minimizing ||N Q - M|| (orthogonal Procrustes).
    """
    u, _, vh = scipy.linalg.svd(N.conj().T @ M)
    return u @ vh


def _half_plane(lam):
    return int(np.sign(complex(lam).imag))


def rebalanced_blocks(kernels, gap=DIVIDED_DIFFERENCE_GAP):
    """
    State blocks V_i of the kernels, where a block whose eigenvalue lies
    within ``gap`` of an earlier one (same half plane, same kernel
    dimension) is replaced by the divided difference
    (V_j - V_i Q) / (λ_j - λ_i), with Q aligning the two kernel bases.

    These are column operations on [V_1 ... V_h], so the span and the rank
    are unchanged; the blocks of a close pair stop being nearly parallel.
    Conjugate members get conjugate differences.
    """
    blocks = []
    for j, kernel in enumerate(kernels):
        V = kernel.V
        lam = complex(kernel.lam)
        for other in kernels[:j]:
            delta = lam - complex(other.lam)
            if not kernel.q or other.q != kernel.q or _half_plane(other.lam) != _half_plane(lam):
                continue
            if delta == 0 or abs(delta) >= gap * max(1.0, abs(lam)):
                continue
            Q = _align(other.stacked, kernel.stacked)
            V = (kernel.V - other.V @ Q) / delta
            break
        blocks.append(V)
    return blocks


def kernel_rank(kernels, tol=DEFAULT_TOL):
    """
    rank [V_1 ... V_h] over C, with unit-scale threshold, computed on the
    rebalanced blocks.
    """
    blocks = [V for V in rebalanced_blocks(kernels) if V.shape[1]]
    if not blocks:
        return 0
    return rank_of(np.hstack(blocks), tol, scale=1.0)


def _resolve_mode(system, mode):
    if mode is None:
        return ROSENBROCK if system.has_output else REACHABILITY
    if mode not in MODES:
        raise InputError(f"Unknown mode '{mode}'; use one of {', '.join(MODES)}.")
    if mode == ROSENBROCK:
        system.require_output('rosenbrock mode')
    return mode


def build_Kh(system, spectrum, tol=DEFAULT_TOL, mode=None):
    """
    Validates the spectrum against the forbidden set of the mode (invariant
    zeros or uncontrollable eigenvalues), computes one pencil kernel per λ
    and returns the real subspace they span.
    """
    mode = _resolve_mode(system, mode)
    if mode == ROSENBROCK:
        forbidden = invariant_zeros(system, tol).distinct
    else:
        forbidden = uncontrollable_eigenvalues(system.A, system.B, tol)
    spectrum = validate_spectrum(spectrum, forbidden, tol)
    kernels = [None] * len(spectrum)
    for i in spectrum.representatives():
        lam = spectrum.lambdas[i]
        if mode == ROSENBROCK:
            kernels[i] = rosenbrock_kernel(system, lam, tol)
        else:
            kernels[i] = reach_pencil_kernel(system.A, system.B, lam, tol)
    for i, tag in enumerate(spectrum.tags):
        if kernels[i] is None:
            kernels[i] = kernels[tag.partner].conjugate()
    blocks = rebalanced_blocks(kernels)
    parts = []
    for i in spectrum.representatives():
        V = blocks[i]
        parts += [V.real] if kernels[i].is_real else [V.real, V.imag]
    spanning = np.hstack(parts) if parts else np.zeros((system.n, 0))
    Kh = image_basis(spanning, tol, scale=1.0)
    logger.debug("K_h for %d eigenvalues (%s mode) has dimension %d", len(spectrum), mode, Kh.dim)
    return KhResult(Kh=Kh, kernels=tuple(kernels), spectrum=spectrum, mode=mode)


def min_distinct_spectrum(system, mode=None, tol=DEFAULT_TOL):
    """
    Smallest h for which K_h reaches its largest possible dimension: the
    Krylov index of (A, B) in reachability mode, and otherwise the smallest
    l with dim(V* ∩ S_l) = dim R* (0 when R* = 0).
    """
    mode = _resolve_mode(system, mode)
    if mode == REACHABILITY:
        return reachable_subspace(system.A, system.B, tol).index
    vs = vstar(system, tol)
    chain = sstar_sequence(system, tol)
    target = subspace_intersect(vs, chain.limit, tol).dim
    if target == 0:
        return 0
    for ell in range(len(chain)):
        if subspace_intersect(vs, chain.term(ell), tol).dim == target:
            return ell
    return chain.stationary_index


def reach_on_Kh(system, spectrum, tol=DEFAULT_TOL, mode=None):
    """
    The reachability subspace on K_h. It does not depend on the eigenvalues,
    only on h: it equals the largest output-nulling subspace inside S_h.
    """
    result = build_Kh(system, spectrum, tol, mode)
    target = system if result.mode == ROSENBROCK else system.without_output()
    return reachability_on(target, result.Kh, tol)


def place(system, spectrum, tol=DEFAULT_TOL, cond_warn=COND_WARN):
    """
    Pole placement on the reachable subspace: F with A + BF having the
    requested eigenvalues, eigenvectors chosen from ker [A - λI, B].
    """
    plant = system.without_output()
    result = build_Kh(plant, spectrum, tol, REACHABILITY)
    return friend_of(plant, result.Kh, result.spectrum, tol, cond_warn)


def diag_krylov_saturation(Delta, H, tol=DEFAULT_TOL):
    """
    Krylov index of a diagonal Δ and an arbitrary H, which never exceeds the
    number of distinct diagonal values.
    """
    Delta = as_matrix(Delta, name='Delta')
    k = Delta.shape[0]
    if Delta.shape[1] != k:
        raise NonDiagonalInput(f"Delta must be square, got shape {Delta.shape}.")
    H = as_matrix(H, rows=k, name='H')
    diagonal = np.diag(Delta)
    off = Delta - np.diag(diagonal)
    if np.max(np.abs(off), initial=0.0) > tol.abs * max(1.0, np.max(np.abs(diagonal), initial=0.0)):
        raise NonDiagonalInput("Delta has nonzero off-diagonal entries.")
    distinct = []
    for value in diagonal:
        if all(abs(value - other) > tol.abs * max(1.0, abs(value)) for other in distinct):
            distinct.append(value)
    index = krylov_chain(np.diag(diagonal), H, tol).stationary_index
    if index > len(distinct):
        raise NumericalError(
            f"Krylov index {index} exceeds the {len(distinct)} distinct diagonal values."
        )
    return index
