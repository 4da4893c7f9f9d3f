# eigenstructure/feedback.py
"""
Real state feedback from a chosen set of closed-loop eigenvectors.

A selection is a list of ``Assigned`` triples (λ, v, w) with (A - λI) v + B w = 0.
Conjugate pairs enter the synthesis through their real and imaginary parts,
which keeps F real; columns outside the selection can be completed with a
caller-supplied real map.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DependentSelection, NonSelfConjugateSelection
from .linalg import DEFAULT_TOL, Tol, image_basis, is_real, pinv, projector_residual, rank_of

logger = logging.getLogger(__name__)

COND_WARN = 1e8
# Largest imaginary part, relative to max(1, ||F||), of the feedback formed from complex eigenvectors.
REAL_FEEDBACK_LIMIT = 1e-10


@dataclass(frozen=True, eq=False)
class Assigned:
    lam: complex
    v: np.ndarray
    w: np.ndarray


@dataclass(frozen=True, eq=False)
class FeedbackResult:
    """
    Feedback matrix F together with the residuals that certify it.
    """
    F: np.ndarray
    assigned: tuple = ()
    residual_eig: float = 0.0
    residual_out: float = 0.0
    residual_inv: float = 0.0
    cond_V: float = 1.0
    imag_part: float = 0.0
    warnings: tuple = field(default=())

    @property
    def eigenvalues(self):
        return tuple(a.lam for a in self.assigned)


def _unit(x):
    norm = np.linalg.norm(x)
    return x / norm if norm > 0 else x


def realify(entries):
    """
    Real columns spanning the selection: Re v for real λ, [Re v, Im v] once
    per conjugate pair (the member with Im λ > 0). Returns (V, W).
    """
    V_cols, W_cols = [], []
    for entry in entries:
        lam = complex(entry.lam)
        if lam.imag == 0:
            V_cols.append(np.real(entry.v))
            W_cols.append(np.real(entry.w))
        elif lam.imag > 0:
            V_cols += [np.real(entry.v), np.imag(entry.v)]
            W_cols += [np.real(entry.w), np.imag(entry.w)]
    if not V_cols:
        return None, None
    return np.column_stack(V_cols), np.column_stack(W_cols)


def check_conjugate_pairs(entries, tol=DEFAULT_TOL):
    """
    Every non-real λ needs its conjugate in the selection, carrying the
    conjugate vector.
    """
    for i, entry in enumerate(entries):
        lam = complex(entry.lam)
        if lam.imag == 0:
            if np.iscomplexobj(entry.v) and np.max(np.abs(np.imag(entry.v)), initial=0.0) > tol.abs:
                raise NonSelfConjugateSelection(f"Vector {i} for real λ = {lam.real} is not real.")
            continue
        scale = tol.abs * max(1.0, abs(lam))
        partners = [
            other for other in entries
            if abs(complex(other.lam) - lam.conjugate()) <= scale
            and np.linalg.norm(other.v - np.conj(entry.v)) <= tol.abs * max(1.0, np.linalg.norm(entry.v))
        ]
        if not partners:
            raise NonSelfConjugateSelection(
                f"λ = {lam} has no partner with the conjugate vector in the selection."
            )


def select_columns(kernels, target_dim, tol=DEFAULT_TOL, start=None):
    """
    Round-robin choice of one kernel column per λ per round, keeping the
    realified span independent and at most ``target_dim``.

    ``kernels`` holds one kernel per real λ and per upper member of a pair;
    a pair contributes two real dimensions and is skipped when that would
    overshoot. Returns the chosen entries and the real span they reach.
    """
    if start is None:
        n = kernels[0].V.shape[0] if kernels else 0
        span = np.zeros((n, 0))
    else:
        span = start
    rank = span.shape[1]
    cursors = [0] * len(kernels)
    chosen = []
    progress = True
    while progress and rank < target_dim:
        progress = False
        for idx, kernel in enumerate(kernels):
            if rank >= target_dim:
                break
            width = 1 if kernel.is_real else 2
            while cursors[idx] < kernel.q:
                col = cursors[idx]
                cursors[idx] += 1
                v, w = kernel.V[:, col], kernel.W[:, col]
                if np.linalg.norm(v) <= tol.abs:
                    continue
                if rank + width > target_dim:
                    break
                if kernel.is_real:
                    candidate = _unit(np.real(v)).reshape(-1, 1)
                else:
                    candidate = np.column_stack([_unit(np.real(v)), _unit(np.imag(v))])
                trial = np.hstack([span, candidate])
                if rank_of(trial, tol, scale=1.0) == rank + width:
                    span = np.hstack([span, candidate])
                    rank += width
                    chosen.append(Assigned(kernel.lam, v, w))
                    if not kernel.is_real:
                        chosen.append(Assigned(np.conj(kernel.lam), np.conj(v), np.conj(w)))
                    progress = True
                    break
    logger.debug("Round-robin selection reached %d of %d dimensions", rank, target_dim)
    return chosen, span


def synthesize(A, B, entries, tol=DEFAULT_TOL, C=None, D=None, completion=None,
               cond_warn=COND_WARN):
    """
    F = [W, Wc] [V, Vc]^+ from the realified selection and an optional real
    completion (Vc, Wc). Raises DependentSelection when the columns are not
    independent.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n, m = B.shape
    check_conjugate_pairs(entries, tol)
    V, W = realify(entries)
    if V is None:
        V, W = np.zeros((n, 0)), np.zeros((m, 0))
    if completion is not None:
        V = np.hstack([V, completion[0]])
        W = np.hstack([W, completion[1]])
    if V.shape[1] == 0:
        return FeedbackResult(F=np.zeros((m, n)))
    normalized = V / np.maximum(np.linalg.norm(V, axis=0), 1e-300)
    if rank_of(normalized, tol, scale=1.0) < V.shape[1]:
        raise DependentSelection(
            f"The {V.shape[1]} selected columns span only a "
            f"{rank_of(normalized, tol, scale=1.0)}-dimensional subspace."
        )
    F = W @ pinv(V, tol)
    result = evaluate(A, B, F, entries, V, tol, C=C, D=D, cond_warn=cond_warn)
    Fc = complex_feedback(entries, n, m, tol, completion)
    imag_part = float(np.max(np.abs(Fc.imag), initial=0.0))
    warnings = result.warnings
    if not is_real(Fc, Tol(rel=tol.rel, abs=REAL_FEEDBACK_LIMIT * max(1.0, np.linalg.norm(F, 2)))):
        warnings += (f"Feedback from the complex eigenvectors has imaginary part {imag_part:.3e}.",)
        logger.warning("Complex-eigenvector feedback is not real: max |Im F| = %.3e", imag_part)
    return replace(result, imag_part=imag_part, warnings=warnings)


def complex_feedback(entries, n, m, tol=DEFAULT_TOL, completion=None):
    """
    W V^+ formed from the complex eigenvectors as selected, without splitting
    pairs into real and imaginary parts. Real up to rounding for a
    self-conjugate selection.
    """
    V = np.zeros((n, 0), dtype=complex)
    W = np.zeros((m, 0), dtype=complex)
    if entries:
        V = np.column_stack([np.asarray(e.v, dtype=complex) for e in entries])
        W = np.column_stack([np.asarray(e.w, dtype=complex) for e in entries])
    if completion is not None:
        V = np.hstack([V, completion[0]])
        W = np.hstack([W, completion[1]])
    return W @ pinv(V, tol)


def evaluate(A, B, F, entries, V, tol=DEFAULT_TOL, C=None, D=None, cond_warn=COND_WARN):
    """
    Residuals of a candidate F on the selection and on span V.
    """
    closed = A + B @ F
    residual_eig = 0.0
    for entry in entries:
        v = np.asarray(entry.v)
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        residual_eig = max(residual_eig, float(np.linalg.norm(closed @ v - entry.lam * v) / norm))
    residual_out = 0.0
    residual_inv = 0.0
    cond_V = 1.0
    warnings = []
    if V.shape[1]:
        basis = image_basis(V, tol, scale=1.0)
        if C is not None and np.size(C):
            residual_out = float(np.linalg.norm((C + D @ F) @ basis.basis, 2))
        residual_inv = projector_residual(basis, closed @ basis.basis)
        s = np.linalg.svd(V / np.maximum(np.linalg.norm(V, axis=0), 1e-300), compute_uv=False)
        cond_V = float(s[0] / s[-1]) if s[-1] > 0 else float('inf')
        if cond_V > cond_warn:
            warnings.append(f"Eigenvector matrix is ill-conditioned (cond = {cond_V:.3e}).")
            logger.warning("Ill-conditioned eigenvector matrix: cond = %.3e", cond_V)
    return FeedbackResult(
        F=F,
        assigned=tuple(entries),
        residual_eig=residual_eig,
        residual_out=residual_out,
        residual_inv=residual_inv,
        cond_V=cond_V,
        warnings=tuple(warnings),
    )
