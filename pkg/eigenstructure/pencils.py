# eigenstructure/pencils.py
"""
Kernels of the reachability pencil S(λ) = [A - λI, B] and of the Rosenbrock
pencil P(λ) = [[A - λI, B], [C, D]], plus the two families of "forbidden"
values they depend on: uncontrollable eigenvalues and invariant zeros.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import (
    DuplicateEigenvalue,
    NotSelfConjugate,
    SpectrumError,
    TooCloseToForbidden,
)
from .linalg import DEFAULT_TOL, Tol, kernel_basis, rank_of

logger = logging.getLogger(__name__)

REACHABILITY = 'reachability'
ROSENBROCK = 'rosenbrock'

# Rank-drop confirmation of computed zeros tolerates the error of the zero itself.
ZERO_CONFIRM_REL = 1e-8
NORMAL_RANK_SAMPLES = 5
FORBIDDEN_MARGIN = 10.0


def as_scalar(lam):
    """
    Python complex, or float when the imaginary part is exactly zero.
    """
    lam = complex(lam)
    return lam.real if lam.imag == 0 else lam


@dataclass(frozen=True, eq=False)
class PencilKernel:
    """
    Orthonormal basis [V; W] of a pencil kernel at one λ, split into the
    state part V (n x q) and the input part W (m x q).

    Columns are ordered by increasing input effort ||w||, so eigenvectors of
    A (w = 0) come first.
    """
    lam: complex
    V: np.ndarray
    W: np.ndarray
    kind: str = REACHABILITY

    @property
    def q(self):
        return self.V.shape[1]

    @property
    def stacked(self):
        return np.vstack([self.V, self.W])

    @property
    def is_real(self):
        return not isinstance(self.lam, complex) or self.lam.imag == 0

    def conjugate(self):
        """
        Kernel at the conjugate value, as the entrywise conjugate basis.
        """
        return PencilKernel(as_scalar(np.conj(self.lam)), self.V.conj(), self.W.conj(), self.kind)

    def columns(self, coefficients):
        """
        (v, w) pairs for the given coefficient vector or matrix.
        """
        c = np.asarray(coefficients)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        return self.V @ c, self.W @ c


def _order_by_input_effort(N, n):
    if N.shape[1] <= 1 or N.shape[0] == n:
        return N
    _, _, vh = scipy.linalg.svd(N[n:], full_matrices=True)
    return N @ vh.conj().T[:, ::-1]


def subspace_kernel(system, X, lam, tol=DEFAULT_TOL, kind=ROSENBROCK):
    """
    Kernel of [[(A - λI) X, B], [C X, D]] mapped back to state coordinates
    through the orthonormal basis X. With X = I this is ker P(λ); with C and D
    empty it is ker S(λ).
    """
    lam = as_scalar(lam)
    A, B = system.A, system.B
    n = A.shape[0]
    X = np.asarray(X)
    k = X.shape[1]
    top = np.hstack([(A - lam * np.eye(n)) @ X, B])
    if kind == ROSENBROCK and system.has_output:
        P = np.vstack([top, np.hstack([system.C @ X, system.D])])
    else:
        P = top
    N = _order_by_input_effort(kernel_basis(P, tol).basis, k)
    return PencilKernel(lam, X @ N[:k], N[k:], kind)


def reach_pencil_kernel(A, B, lam, tol=DEFAULT_TOL):
    """
    ker [A - λI, B]; q = n + m - rank, which exceeds m exactly at
    uncontrollable eigenvalues.
    """
    from .sysmodel import SystemQuad

    system = SystemQuad.from_matrices(A, B)
    return subspace_kernel(system, np.eye(system.n), lam, tol, kind=REACHABILITY)


def rosenbrock_kernel(system, lam, tol=DEFAULT_TOL):
    """
    ker [[A - λI, B], [C, D]].
    """
    return subspace_kernel(system, np.eye(system.n), lam, tol, kind=ROSENBROCK)


def _merge_close(values, tol):
    distinct = []
    for lam in values:
        scale = tol.abs * max(1.0, abs(lam))
        if all(abs(lam - other) > scale for other in distinct):
            distinct.append(lam)
    return distinct


def _snap(lam, tol):
    lam = complex(lam)
    if abs(lam.imag) <= tol.abs * max(1.0, abs(lam)):
        return lam.real
    return lam


def sort_spectrum(values):
    return sorted(values, key=lambda z: (round(complex(z).real, 12), complex(z).imag))


def uncontrollable_eigenvalues(A, B, tol=DEFAULT_TOL):
    """
    PBH test: the eigenvalues λ of A at which rank [A - λI, B] < n.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    found = []
    for lam in _merge_close(scipy.linalg.eigvals(A), tol):
        lam = _snap(lam, tol)
        if rank_of(np.hstack([A - lam * np.eye(n), B]), tol) < n:
            found.append(lam)
    logger.debug("PBH test found %d uncontrollable eigenvalues", len(found))
    return sort_spectrum(found)


def normal_rank(system, tol=DEFAULT_TOL, samples=NORMAL_RANK_SAMPLES):
    """
    Normal rank of P(λ), as the largest rank over seeded random λ.
    """
    rng = np.random.default_rng(0)
    radius = 1.0 + float(np.linalg.norm(system.A, 2))
    best = 0
    n = system.n
    for _ in range(samples):
        lam = complex(*(radius * rng.standard_normal(2)))
        P = np.block([[system.A - lam * np.eye(n), system.B], [system.C, system.D]])
        best = max(best, rank_of(P, tol))
    return best


@dataclass(frozen=True)
class ZerosReport:
    """
    Invariant zeros as a multiset and as a set, with the rank-drop check of
    P(λ) against its normal rank for every reported zero.
    """
    zeros: tuple
    distinct: tuple
    normal_rank: int
    confirmed: tuple

    @property
    def all_confirmed(self):
        return all(self.confirmed)


def invariant_zeros(system, tol=DEFAULT_TOL):
    """
    Finite invariant zeros, computed as the spectrum of the block of the
    structural decomposition induced on V*/R*, then cross-checked by the
    rank drop of the Rosenbrock pencil.
    """
    from .geometry import morse_decomposition

    system.require_output('invariant_zeros')
    morse = morse_decomposition(system, tol)
    zeros = sort_spectrum(_snap(z, tol) for z in morse.zeros)
    rank = normal_rank(system, tol)
    confirm_tol = Tol(rel=max(tol.rel, ZERO_CONFIRM_REL), abs=tol.abs)
    n = system.n
    confirmed = []
    for z in zeros:
        P = np.block([[system.A - z * np.eye(n), system.B], [system.C, system.D]])
        confirmed.append(rank_of(P, confirm_tol) < rank)
    if not all(confirmed):
        logger.warning("Rank-drop check missed %d of %d invariant zeros",
                       confirmed.count(False), len(confirmed))
    return ZerosReport(
        zeros=tuple(zeros),
        distinct=tuple(sort_spectrum(_merge_close(zeros, Tol(rel=tol.rel, abs=1e-6)))),
        normal_rank=rank,
        confirmed=tuple(confirmed),
    )


@dataclass(frozen=True)
class SpectrumTag:
    is_real: bool
    partner: int


@dataclass(frozen=True)
class SpectrumSpec:
    """
    A list of distinct closed-loop eigenvalues.

    ``tags`` is empty until the spectrum has been through ``validate_spectrum``,
    which computes the conjugate partner of every entry.
    """
    lambdas: tuple
    tags: tuple = field(default=())

    @classmethod
    def of(cls, values):
        return cls(tuple(as_scalar(v) for v in values))

    @property
    def validated(self):
        return len(self.tags) == len(self.lambdas)

    def __len__(self):
        return len(self.lambdas)

    def representatives(self):
        """
        Indices of the real entries and of the upper member of each pair.
        """
        return [i for i, lam in enumerate(self.lambdas)
                if not isinstance(lam, complex) or lam.imag > 0]


def validate_spectrum(spec, forbidden=(), tol=DEFAULT_TOL):
    """
    Checks distinctness, self-conjugacy and the distance to the forbidden
    set; returns the spectrum with conjugate pairing computed.
    """
    values = [complex(v) for v in spec.lambdas]
    forbidden = [complex(f) for f in forbidden]
    magnitude = max([1.0] + [abs(v) for v in values] + [abs(f) for f in forbidden])
    scale = tol.abs * magnitude
    values = [v.real + 0j if abs(v.imag) <= scale else v for v in values]
    for i, a in enumerate(values):
        for j in range(i):
            if abs(a - values[j]) <= scale:
                raise DuplicateEigenvalue(f"Eigenvalues {values[j]} and {a} are not distinct.")
    tags = []
    for i, a in enumerate(values):
        if a.imag == 0:
            tags.append(SpectrumTag(is_real=True, partner=i))
            continue
        partners = [j for j, b in enumerate(values) if j != i and abs(b - a.conjugate()) <= scale]
        if not partners:
            raise NotSelfConjugate(f"{a} has no conjugate partner in the spectrum.")
        tags.append(SpectrumTag(is_real=False, partner=partners[0]))
    for a in values:
        for f in forbidden:
            if abs(a - f) <= FORBIDDEN_MARGIN * scale:
                raise TooCloseToForbidden(f"{a} is too close to the forbidden value {f}.")
    # Exact conjugates, so that kernels of a pair are conjugate as well.
    for i, tag in enumerate(tags):
        if not tag.is_real and values[i].imag < 0:
            values[i] = values[tag.partner].conjugate()
    return SpectrumSpec(tuple(as_scalar(v) for v in values), tuple(tags))


def parse_lambdas(text):
    """
    Parses "-1,-2,-1+2i,-1-2i" (``j`` is accepted in place of ``i``).
    """
    values = []
    for token in str(text).split(','):
        token = token.strip().replace(' ', '')
        if not token:
            continue
        try:
            values.append(as_scalar(complex(token.replace('i', 'j'))))
        except ValueError as exc:
            raise SpectrumError(f"Cannot parse eigenvalue literal '{token}'.") from exc
    if not values:
        raise SpectrumError("No eigenvalues given.")
    return SpectrumSpec(tuple(values))
