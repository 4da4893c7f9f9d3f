# eigenstructure/geometry.py
"""
Invariant-subspace algorithms of the geometric approach.

Chains are computed by fixed-point recursions that stop when the integer
dimension stops changing; every recursion is monotone, so this happens after
at most n + 1 steps.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    AmbientMismatch,
    DecompositionResidualError,
    FriendDependenceError,
    InputError,
    NotOutputNulling,
    SpectrumNotAssignable,
)
from .feedback import COND_WARN, FeedbackResult, evaluate, select_columns, synthesize
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    equals,
    image_basis,
    image_of,
    kernel_basis,
    orthogonal_complement,
    preimage,
    projector_residual,
    rank_of,
    subspace_intersect,
    subspace_sum,
)
from .pencils import ROSENBROCK, subspace_kernel

logger = logging.getLogger(__name__)

Reachability = namedtuple('Reachability', ['subspace', 'index'])


def _norm(M):
    M = np.asarray(M)
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


class SubspaceChain:
    """
    A monotone sequence of subspaces ending at its first repeated dimension.

    ``term(k)`` saturates: indices past the end return the limit.
    """

    def __init__(self, terms):
        self.terms = tuple(terms)

    @property
    def limit(self):
        return self.terms[-1]

    @property
    def dims(self):
        return [t.dim for t in self.terms]

    @property
    def stationary_index(self):
        """
        First k with term(k) equal to the limit.
        """
        return len(self.terms) - 2 if len(self.terms) > 1 else 0

    def term(self, k):
        if k < 0:
            raise InputError("Chain indices start at 0.")
        return self.terms[min(k, len(self.terms) - 1)]

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"SubspaceChain(dims={self.dims})"


def _iterate(first, step, n):
    terms = [first]
    for _ in range(n + 1):
        nxt = step(terms[-1])
        terms.append(nxt)
        if nxt.dim == terms[-2].dim:
            break
    return SubspaceChain(terms)


def krylov_chain(A, B, tol=DEFAULT_TOL):
    """
    R_0 = {0}, R_{k+1} = im B + A R_k, i.e. R_k = im [B, AB, ..., A^{k-1} B],
    computed by orthonormal iteration instead of raw powers.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    n = A.shape[0]
    scale = max(_norm(A), _norm(B))

    def step(R):
        return image_basis(np.hstack([B, A @ R.basis]), tol, scale=scale)

    return _iterate(Subspace.zero(n), step, n)


def reachable_subspace(A, B, tol=DEFAULT_TOL):
    """
    Reachable subspace R = <A | im B> and the smallest h with
    im [B ... A^{h-1} B] = R (0 when B = 0).
    """
    chain = krylov_chain(A, B, tol)
    return Reachability(chain.limit, chain.stationary_index)


def invariant_closure(M, S, tol=DEFAULT_TOL):
    """
    <M | S>, the smallest M-invariant subspace containing S.
    """
    M = np.asarray(M)
    if S.is_zero:
        return S
    scale = max(1.0, _norm(M))

    def step(R):
        return image_basis(np.hstack([S.basis, M @ R.basis]), tol, scale=scale)

    return _iterate(S, step, S.ambient_dim).limit


def unobservable_subspace(C, A, tol=DEFAULT_TOL):
    """
    Largest A-invariant subspace in ker C, by Q_{k+1} = ker C ∩ A^{-1} Q_k.
    """
    from .exceptions import EmptyOutputError

    C = np.asarray(C)
    if C.shape[0] == 0:
        raise EmptyOutputError("The unobservable subspace needs an output map C with p >= 1.")
    kerC = kernel_basis(C, tol)
    n = np.asarray(A).shape[0]
    return _iterate(kerC, lambda Q: subspace_intersect(kerC, preimage(A, Q, tol), tol), n).limit


def vstar_sequence(system, E=None, tol=DEFAULT_TOL):
    """
    V_0 = E, V_{i+1} = E ∩ [A; C]^{-1}((V_i ⊕ 0) + im [B; D]).

    With p = 0 this is the largest controlled invariant subspace in E.

    Each step is one kernel in the coordinates of V_i: x = X ξ belongs to
    V_{i+1} when A X ξ = X η + B u and C X ξ = D u for some η and u.
    """
    n = system.n
    E = Subspace.full(n) if E is None else E
    if E.ambient_dim != n:
        raise AmbientMismatch(f"E lives in R^{E.ambient_dim}, the state space is R^{n}.")
    p = system.p

    def step(V):
        if V.is_zero:
            return V
        X, k = V.basis, V.dim
        M = np.vstack([
            np.hstack([system.A @ X, -X, -system.B]),
            np.hstack([system.C @ X, np.zeros((p, k)), -system.D]),
        ])
        coords = kernel_basis(M, tol).basis[:k]
        return image_basis(X @ coords, tol, scale=1.0)

    chain = _iterate(E, step, n)
    logger.debug("V* chain dims %s", chain.dims)
    return chain


def vstar(system, tol=DEFAULT_TOL):
    return vstar_sequence(system, tol=tol).limit


def _lift(S, m):
    """
    Orthonormal basis of S ⊕ U inside R^{n+m}.
    """
    n = S.ambient_dim
    return np.block([
        [S.basis, np.zeros((n, m))],
        [np.zeros((m, S.dim)), np.eye(m)],
    ])


def sstar_sequence(system, tol=DEFAULT_TOL):
    """
    S_0 = {0}, S_{i+1} = [A B] ((S_i ⊕ U) ∩ ker [C D]).

    With p = 0, S_h is the h-step reachable subspace.
    """
    n, m = system.n, system.m
    CD = np.hstack([system.C, system.D])
    AB = np.hstack([system.A, system.B])
    cd_scale = _norm(CD)
    ab_scale = _norm(AB)

    def step(S):
        lifted = _lift(S, m)
        coords = kernel_basis(CD @ lifted, tol, scale=cd_scale)
        image = image_basis(AB @ lifted @ coords.basis, tol, scale=ab_scale)
        return subspace_sum(S, image, tol)

    chain = _iterate(Subspace.zero(n), step, n)
    logger.debug("S* chain dims %s", chain.dims)
    return chain


def _maps_into(M, V, target, tol):
    if V.is_zero:
        return True
    return projector_residual(target, M @ V.basis) <= tol.abs * max(1.0, _norm(M))


def is_controlled_invariant(A, B, V, tol=DEFAULT_TOL):
    """
    A V ⊆ V + im B.
    """
    target = image_basis(np.hstack([V.basis, B]), tol, scale=max(1.0, _norm(B)))
    return _maps_into(np.asarray(A), V, target, tol)


def is_output_nulling(system, V, tol=DEFAULT_TOL):
    """
    [A; C] V ⊆ (V ⊕ 0) + im [B; D].
    """
    spanning = np.block([[V.basis, system.B], [np.zeros((system.p, V.dim)), system.D]])
    target = image_basis(spanning, tol, scale=max(1.0, _norm(system.stacked_input_map())))
    return _maps_into(system.stacked_state_map(), V, target, tol)


def is_conditioned_invariant(C, A, S, tol=DEFAULT_TOL):
    """
    A (S ∩ ker C) ⊆ S.
    """
    inner = subspace_intersect(S, kernel_basis(C, tol), tol)
    return _maps_into(np.asarray(A), inner, S, tol)


def is_input_containing(system, S, tol=DEFAULT_TOL):
    """
    [A B] ((S ⊕ U) ∩ ker [C D]) ⊆ S.
    """
    lifted = _lift(S, system.m)
    coords = kernel_basis(np.hstack([system.C, system.D]) @ lifted, tol,
                          scale=_norm(np.hstack([system.C, system.D])))
    vectors = Subspace(lifted @ coords.basis)
    return _maps_into(np.hstack([system.A, system.B]), vectors, S, tol)


def _least_squares_friend(system, V):
    """
    Minimum-norm U solving [[X, -B], [0, -D]] [L; U] = [A X; C X], F = U X^T.
    """
    X = V.basis
    k, m, p = V.dim, system.m, system.p
    M = np.block([[X, -system.B], [np.zeros((p, k)), -system.D]])
    rhs = np.vstack([system.A @ X, system.C @ X])
    sol = scipy.linalg.lstsq(M, rhs, cond=None)[0]
    return sol[k:] @ X.T


def _residual_scale(system, F):
    return 1.0 + _norm(system.A) + _norm(system.B) * _norm(F) + _norm(system.C) + _norm(system.D) * _norm(F)


def friend_of(system, V, spectrum=None, tol=DEFAULT_TOL, cond_warn=COND_WARN):
    """
    A real F with (A + BF) V ⊆ V and (C + DF) V = 0.

    With a spectrum, eigenvectors of A + BF inside V are chosen from the
    kernels of the pencil restricted to V, one λ at a time in round-robin
    order, and the rest of V is completed with the least-squares friend.
    """
    n, m = system.n, system.m
    if V.ambient_dim != n:
        raise AmbientMismatch(f"V lives in R^{V.ambient_dim}, the state space is R^{n}.")
    if V.is_zero:
        return FeedbackResult(F=np.zeros((m, n)))
    if not is_output_nulling(system, V, tol):
        raise NotOutputNulling(f"The {V.dim}-dimensional subspace is not output-nulling.")
    X = V.basis
    F0 = _least_squares_friend(system, V)
    if spectrum is None:
        result = evaluate(system.A, system.B, F0, (), X, tol,
                          C=system.C if system.has_output else None, D=system.D, cond_warn=cond_warn)
    else:
        kernels = []
        for i in spectrum.representatives():
            kernels.append(subspace_kernel(system, X, spectrum.lambdas[i], tol, kind=ROSENBROCK))
        chosen, span = select_columns(kernels, V.dim, tol)
        selected = image_basis(span, tol, scale=1.0)
        Xc = subspace_intersect(V, orthogonal_complement(selected, tol), tol).basis
        result = synthesize(
            system.A, system.B, chosen, tol,
            C=system.C if system.has_output else None, D=system.D,
            completion=(Xc, F0 @ Xc), cond_warn=cond_warn,
        )
    bound = tol.abs * _residual_scale(system, result.F)
    if max(result.residual_eig, result.residual_out, result.residual_inv) > bound:
        error = NotOutputNulling if spectrum is None else SpectrumNotAssignable
        raise error(
            f"Friend residuals ({result.residual_eig:.2e}, {result.residual_out:.2e}, "
            f"{result.residual_inv:.2e}) exceed {bound:.2e}."
        )
    return result


def _start_of_reachability(system, V, tol):
    """
    V ∩ B ker D, the input directions that keep the output at zero.
    """
    directions = image_of(system.B, kernel_basis(system.D, tol), tol)
    return subspace_intersect(V, directions, tol)


def _reachability_with(system, V, F, tol):
    start = _start_of_reachability(system, V, tol)
    return invariant_closure(system.A + system.B @ F, start, tol)


def reachability_sequence(system, V, tol=DEFAULT_TOL):
    """
    R_0 = {0}, R_{k+1} = V ∩ [A B] ((R_k ⊕ U) ∩ ker [C D]): the states of V
    reachable in k steps along trajectories that stay in V with zero output.

    Each step is one kernel: X ν = A Y ρ + B u with C Y ρ + D u = 0, where
    X and Y are bases of V and R_k. No feedback enters the recursion.
    """
    n, p = system.n, system.p
    if V.ambient_dim != n:
        raise AmbientMismatch(f"V lives in R^{V.ambient_dim}, the state space is R^{n}.")
    X, v = V.basis, V.dim

    def step(R):
        Y = R.basis
        M = np.vstack([
            np.hstack([X, -system.A @ Y, -system.B]),
            np.hstack([np.zeros((p, v)), system.C @ Y, system.D]),
        ])
        coords = kernel_basis(M, tol).basis[:v]
        return subspace_sum(R, image_basis(X @ coords, tol, scale=1.0), tol)

    return _iterate(Subspace.zero(n), step, v)


def _inputs_into(system, V, tol):
    """
    Orthonormal basis of B^{-1} V ∩ ker D, from one kernel in the
    coordinates of V.
    """
    m, p = system.m, system.p
    X = V.basis
    M = np.vstack([
        np.hstack([system.B, -X]),
        np.hstack([system.D, np.zeros((p, V.dim))]),
    ])
    return image_basis(kernel_basis(M, tol).basis[:m], tol, scale=1.0)


def _second_friend(system, V, F, tol):
    """
    F + Ω Z X^T with Ω a basis of B^{-1} V ∩ ker D and Z drawn from seed 0.
    Every such map is again a friend of V, and its size stays that of F.
    """
    inputs = _inputs_into(system, V, tol)
    if inputs.is_zero:
        return None
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((inputs.dim, V.dim))
    Z /= np.linalg.norm(Z, 2)
    return F + max(1.0, _norm(F)) * inputs.basis @ Z @ V.basis.T


def reachability_on(system, V, tol=DEFAULT_TOL):
    """
    The reachability subspace of an output-nulling V, as the limit of
    ``reachability_sequence``. It must equal <A + BF | V ∩ B ker D> for the
    least-squares friend F of V and for a second friend that differs from F
    on V.
    """
    if V.is_zero:
        return Subspace.zero(system.n)
    first = friend_of(system, V, None, tol).F
    R = reachability_sequence(system, V, tol).limit
    friends = [first]
    second = _second_friend(system, V, first, tol)
    if second is not None:
        friends.append(second)
    for F in friends:
        closure = _reachability_with(system, V, F, tol)
        if not equals(R, closure, tol):
            raise FriendDependenceError(
                f"Reachability subspace depends on the friend (dims {R.dim} and {closure.dim})."
            )
    return R


def rstar(system, tol=DEFAULT_TOL):
    """
    R*, the largest output-nulling reachability subspace.
    """
    return reachability_on(system, vstar(system, tol), tol)


@dataclass(frozen=True, eq=False)
class MorseDecomposition:
    """
    Orthogonal state and input coordinates T, Omega in which A + BF, B,
    C + DF and D show the zero blocks of the R* / V* / rest split.
    """
    T: np.ndarray
    Omega: np.ndarray
    F: np.ndarray
    A_bar: np.ndarray
    B_bar: np.ndarray
    C_bar: np.ndarray
    D_bar: np.ndarray
    dim_rstar: int
    dim_vstar: int
    inputs_rstar: int
    zeros: tuple
    residual: float
    input_block_full_rank: bool

    @property
    def blocks(self):
        r, v, n = self.dim_rstar, self.dim_vstar, self.T.shape[0]
        return {'rstar': r, 'vstar_mod_rstar': v - r, 'rest': n - v}


def morse_decomposition(system, tol=DEFAULT_TOL):
    """
    Structural decomposition with respect to R* ⊆ V* and a friend F of V*.
    The invariant zeros are the eigenvalues of the middle diagonal block.
    """
    system.require_output('morse_decomposition')
    n, m = system.n, system.m
    Vs = vstar(system, tol)
    F = friend_of(system, Vs, None, tol).F
    Rs = _reachability_with(system, Vs, F, tol)
    r, v = Rs.dim, Vs.dim
    T1 = Rs.basis
    T2 = image_basis(Vs.basis - T1 @ (T1.T @ Vs.basis), tol, scale=1.0).basis if v > r else np.zeros((n, 0))
    T3 = orthogonal_complement(Vs, tol).basis
    T = np.hstack([T1, T2, T3])
    if T.shape[1] != n or T2.shape[1] != v - r:
        raise DecompositionResidualError("Could not complete R* ⊆ V* to an orthogonal basis.")
    Om1 = subspace_intersect(preimage(system.B, Vs, tol), kernel_basis(system.D, tol), tol)
    Om = np.hstack([Om1.basis, orthogonal_complement(Om1, tol).basis])
    k1 = Om1.dim
    A_cl, C_cl = system.closed_loop(F)
    A_bar = T.T @ A_cl @ T
    B_bar = T.T @ system.B @ Om
    C_bar = C_cl @ T
    D_bar = system.D @ Om
    zero_blocks = [
        A_bar[r:v, :r], A_bar[v:, :r], A_bar[v:, r:v],
        B_bar[r:v, :k1], B_bar[v:, :k1],
        C_bar[:, :r], C_bar[:, r:v], D_bar[:, :k1],
    ]
    residual = max((float(np.max(np.abs(b))) for b in zero_blocks if b.size), default=0.0)
    bound = tol.abs * _residual_scale(system, F)
    if residual > bound:
        raise DecompositionResidualError(
            f"Structural zero blocks have residual {residual:.2e} > {bound:.2e}."
        )
    if r and reachable_subspace(A_bar[:r, :r], B_bar[:r, :k1], tol).subspace.dim != r:
        raise DecompositionResidualError("The R* block is not reachable from its inputs.")
    lower = np.vstack([B_bar[v:, k1:], D_bar[:, k1:]])
    full_rank = lower.shape[1] == 0 or rank_of(lower, tol) == lower.shape[1]
    if not full_rank:
        logger.warning("Input block of the decomposition lost column rank")
    zeros = tuple(scipy.linalg.eigvals(A_bar[r:v, r:v])) if v > r else ()
    return MorseDecomposition(
        T=T, Omega=Om, F=F, A_bar=A_bar, B_bar=B_bar, C_bar=C_bar, D_bar=D_bar,
        dim_rstar=r, dim_vstar=v, inputs_rstar=k1, zeros=zeros,
        residual=residual, input_block_full_rank=full_rank,
    )


def _markov_matrix(system, rows):
    """
    Block lower-triangular Toeplitz matrix with D on the diagonal and
    C A^k B below it.

    Block row i is divided by the largest ||D|| or ||C|| ||A^k B|| among its
    blocks, not by its own norm, so a row that is zero up to rounding stays
    near zero.
    """
    p, m = system.p, system.m
    markov = [system.D]
    factors = [_norm(system.D)]
    c_norm = _norm(system.C)
    power = system.B
    for _ in range(rows - 1):
        markov.append(system.C @ power)
        factors.append(c_norm * _norm(power))
        power = system.A @ power
    T = np.zeros((rows * p, rows * m))
    for i in range(rows):
        for j in range(i + 1):
            T[i * p:(i + 1) * p, j * m:(j + 1) * m] = markov[i - j]
        scale = max(factors[:i + 1])
        if scale > 0:
            T[i * p:(i + 1) * p] /= scale
    return T


def intersection_formula(system, i, j, tol=DEFAULT_TOL):
    """
    [A^{j-1}B ... B 0 ... 0] ker T_{i+j}, with T_{i+j} the block Toeplitz
    matrix of the first i + j Markov parameters and i zero blocks.

    Equals V_i ∩ S_j (with V_0 the whole space).
    """
    system.require_output('intersection_formula')
    if i < 1 or j < 1:
        raise InputError("The intersection formula needs i >= 1 and j >= 1.")
    n, m = system.n, system.m
    rows = i + j
    coords = kernel_basis(_markov_matrix(system, rows), tol, scale=1.0)
    R = np.zeros((n, rows * m))
    power = system.B
    for k in range(j):
        col = j - 1 - k
        R[:, col * m:(col + 1) * m] = power
        power = system.A @ power
    return image_basis(R @ coords.basis, tol, scale=max(1.0, _norm(R)))

