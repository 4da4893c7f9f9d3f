# eigenstructure/verification.py
"""
Seeded property suites for the structural rank identities.

Each check draws one random instance per trial from its own seed, so a
failing trial can be replayed from the ``first_failing_seed`` in the report.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .assignment import build_Kh, diag_krylov_saturation, place, reach_on_Kh
from .exceptions import (
    DependentSelection,
    GenerationFailure,
    GeokitError,
    SpectrumNotAssignable,
    UnknownOperation,
)
from .feedback import REAL_FEEDBACK_LIMIT
from .geometry import (
    friend_of,
    intersection_formula,
    krylov_chain,
    reachability_on,
    rstar,
    sstar_sequence,
    vstar_sequence,
)
from .linalg import (
    DEFAULT_TOL,
    image_of,
    kernel_basis,
    projector_residual,
    rank_of,
    subspace_distance,
    subspace_intersect,
)
from .pencils import (
    REACHABILITY,
    ROSENBROCK,
    SpectrumSpec,
    invariant_zeros,
    uncontrollable_eigenvalues,
)
from .sysmodel import GenSpec, random_system

logger = logging.getLogger(__name__)

MAX_DETAILS = 10
MAX_INPUTS = 3
MAX_OUTPUTS = 3
# Distances kept between drawn eigenvalues and the forbidden set.
SAFE_DISTANCE = 1e-2
CLOSE_PAIR = 1e-3
SUBSPACE_RESIDUAL = 1e-8
EIGENVALUE_MATCH = 1e-6

CHECKS = {}


def register(check_id):
    """
    Adds a check to the registry under ``check_id``.
    """
    def decorator(func):
        CHECKS[check_id] = func
        return func
    return decorator


def trial_seed(seed, k):
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


@dataclass(frozen=True)
class VerifyOptions:
    trials: int = 100
    seed: int = 0
    nmax: int = 8
    tol: object = DEFAULT_TOL
    workers: int = 1
    retry_budget: int = 100


@dataclass
class CheckReport:
    check: str
    trials: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_failing_seed: int | None = None
    details: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self):
        return self.failed == 0

    def record(self, seed, failures):
        self.trials += 1
        if failures:
            self.failed += 1
            if self.first_failing_seed is None:
                self.first_failing_seed = seed
            for message in failures:
                if len(self.details) < MAX_DETAILS:
                    self.details.append({'seed': seed, 'message': message})
        else:
            self.passed += 1


# Instance generators

def _dims(rng, nmax, outputs=False):
    n = int(rng.integers(2, nmax + 1))
    m = int(rng.integers(1, min(MAX_INPUTS, n) + 1))
    p = int(rng.integers(1, min(MAX_OUTPUTS, n) + 1)) if outputs else 0
    return n, m, p


def _seed(rng):
    return int(rng.integers(2 ** 32))


def _plant(rng, options):
    """
    p = 0 system, controllable or with a random reachable dimension.
    """
    n, m, _ = _dims(rng, options.nmax)
    if rng.random() < 0.5:
        spec = GenSpec(n, m, seed=_seed(rng), controllable=True)
    else:
        spec = GenSpec(n, m, seed=_seed(rng), reachable_dim=int(rng.integers(1, n + 1)))
    return random_system(spec, options.retry_budget, options.tol)


def _system(rng, options, square=False):
    """
    p >= 1 system: generic, strictly proper, or built around a given dim R*.
    """
    n, m, p = _dims(rng, options.nmax, outputs=True)
    if square:
        p = m
    roll = rng.random()
    if roll < 0.35 and not square:
        k = int(rng.integers(0 if m <= p else 1, n + 1))
        spec = GenSpec(n, m, p, seed=_seed(rng), target_dim_rstar=k)
    else:
        spec = GenSpec(n, m, p, seed=_seed(rng), feedthrough=square or roll < 0.7)
    return random_system(spec, options.retry_budget, options.tol)


def _spectrum(rng, h, forbidden, close_pair=False):
    """
    h distinct self-conjugate values at least SAFE_DISTANCE from ``forbidden``;
    with ``close_pair`` two of them are CLOSE_PAIR apart.
    """
    forbidden = [complex(f) for f in forbidden]
    for _ in range(100):
        values = []
        if close_pair and h >= 2:
            x = rng.uniform(-2.5, 0.5)
            values += [complex(x), complex(x + CLOSE_PAIR)]
        while len(values) < h:
            if h - len(values) >= 2 and rng.random() < 0.3:
                z = complex(rng.uniform(-2.5, 0.5), rng.uniform(0.2, 1.5))
                values += [z, z.conjugate()]
            else:
                values.append(complex(rng.uniform(-2.5, 0.5)))
        gaps = [abs(a - b) for i, a in enumerate(values) for b in values[:i]]
        if gaps and min(gaps) < (CLOSE_PAIR / 2 if close_pair else SAFE_DISTANCE):
            continue
        if any(abs(v - f) < SAFE_DISTANCE for v in values for f in forbidden):
            continue
        return SpectrumSpec.of(values)
    raise GenerationFailure(f"No admissible spectrum of size {h} after 100 draws.")


def _forbidden(system, mode, tol):
    if mode == ROSENBROCK:
        return invariant_zeros(system, tol).distinct
    return uncontrollable_eigenvalues(system.A, system.B, tol)


def _same(U, V):
    return subspace_distance(U, V) <= SUBSPACE_RESIDUAL


def _match_spectrum(requested, computed):
    """
    Largest distance under a greedy nearest-neighbour pairing of two multisets.
    """
    remaining = [complex(c) for c in computed]
    worst = 0.0
    for lam in requested:
        distances = [abs(complex(lam) - c) for c in remaining]
        k = int(np.argmin(distances))
        worst = max(worst, distances[k] / max(1.0, abs(lam)))
        remaining.pop(k)
    return worst


# Checks

@register('th1')
def check_rank_identity(rng, options):
    """
    rank [V_1 ... V_h] = rank [B ... A^{h-1} B] for every h and two spectra,
    one of them with a close pair.
    """
    tol = options.tol
    system = _plant(rng, options)
    forbidden = _forbidden(system, REACHABILITY, tol)
    chain = krylov_chain(system.A, system.B, tol)
    failures = []
    for h in range(1, system.n + 1):
        for close_pair in (False, True):
            spectrum = _spectrum(rng, h, forbidden, close_pair=close_pair)
            result = build_Kh(system, spectrum, tol, REACHABILITY)
            expected = chain.term(h).dim
            if result.rank != expected:
                failures.append(
                    f"n={system.n} m={system.m} h={h}: rank[V_1..V_h] = {result.rank}, "
                    f"Krylov rank = {expected}"
                )
    return failures


@register('th2')
def check_output_nulling_rank(rng, options):
    """
    rank [V_1 ... V_h] = dim(V* ∩ S_h) = dim of the Markov-kernel formula.
    """
    tol = options.tol
    system = _system(rng, options)
    forbidden = _forbidden(system, ROSENBROCK, tol)
    vs = vstar_sequence(system, tol=tol).limit
    schain = sstar_sequence(system, tol)
    failures = []
    for h in range(1, system.n + 1):
        result = build_Kh(system, _spectrum(rng, h, forbidden), tol, ROSENBROCK)
        direct = subspace_intersect(vs, schain.term(h), tol).dim
        formula = intersection_formula(system, system.n, h, tol).dim
        if not result.rank == direct == formula:
            failures.append(
                f"n={system.n} m={system.m} p={system.p} h={h}: rank {result.rank}, "
                f"V* ∩ S_h {direct}, formula {formula}"
            )
    return failures


@register('lattice')
def check_lattice_maximum(rng, options):
    """
    K_h admits a friend with the requested spectrum, and contains every
    eigenvector at a requested eigenvalue of A + BF' on V*, for a friend F'
    of V* built from a random part of the spectrum and fresh values.
    """
    tol = options.tol
    system = _system(rng, options)
    forbidden = _forbidden(system, ROSENBROCK, tol)
    h = int(rng.integers(1, system.n + 1))
    spectrum = _spectrum(rng, h, forbidden)
    result = build_Kh(system, spectrum, tol, ROSENBROCK)
    failures = []
    friend = friend_of(system, result.Kh, result.spectrum, tol)
    if max(friend.residual_out, friend.residual_inv) > SUBSPACE_RESIDUAL:
        failures.append(f"friend of K_{h} has residuals {friend.residual_out:.2e}, {friend.residual_inv:.2e}")
    vs = vstar_sequence(system, tol=tol).limit
    if vs.is_zero:
        return failures
    subset = []
    for i in result.spectrum.representatives():
        if rng.random() < 0.5:
            lam = result.spectrum.lambdas[i]
            subset += [lam] if not isinstance(lam, complex) else [lam, lam.conjugate()]
    extra = _spectrum(rng, max(0, vs.dim - len(subset)), list(forbidden) + list(spectrum.lambdas))
    try:
        other = friend_of(system, vs, SpectrumSpec.of(subset + list(extra.lambdas)), tol)
    except (SpectrumNotAssignable, DependentSelection) as exc:
        logger.debug("No friend of V* with the mixed spectrum: %s", exc)
        return failures
    X = vs.basis
    values, vectors = scipy.linalg.eig(X.T @ (system.A + system.B @ other.F) @ X)
    for lam in subset:
        for k in np.flatnonzero(np.abs(values - lam) <= EIGENVALUE_MATCH * max(1.0, abs(lam))):
            x = X @ vectors[:, k]
            residual = projector_residual(result.Kh, (x / np.linalg.norm(x)).reshape(-1, 1))
            if residual > EIGENVALUE_MATCH:
                failures.append(
                    f"eigenvector of A + BF' at λ = {lam} is outside K_{h} (residual {residual:.2e})"
                )
    return failures


@register('thlast')
def check_reachability_on_Kh(rng, options):
    """
    The reachability subspace on K_h is the largest output-nulling subspace
    in S_h, does not depend on the spectrum, and the friend of K_h keeps the
    output at zero.
    """
    tol = options.tol
    system = _system(rng, options)
    forbidden = _forbidden(system, ROSENBROCK, tol)
    schain = sstar_sequence(system, tol)
    BkerD = image_of(system.B, kernel_basis(system.D, tol), tol)
    failures = []
    for h in range(1, system.n + 1):
        target = vstar_sequence(system, schain.term(h), tol).limit
        spectrum = _spectrum(rng, h, forbidden)
        R_h = reach_on_Kh(system, spectrum, tol, ROSENBROCK)
        if not _same(R_h, target):
            failures.append(f"h={h}: R_h has dim {R_h.dim}, V*(S_h) has dim {target.dim}")
            continue
        R_h2 = reach_on_Kh(system, _spectrum(rng, h, forbidden), tol, ROSENBROCK)
        if not _same(R_h, R_h2):
            failures.append(f"h={h}: R_h changes with the spectrum")
        Kh = build_Kh(system, spectrum, tol, ROSENBROCK)
        friend = friend_of(system, Kh.Kh, Kh.spectrum, tol)
        if max(friend.residual_out, friend.residual_inv) > SUBSPACE_RESIDUAL:
            failures.append(
                f"h={h}: friend residuals {friend.residual_out:.2e}, {friend.residual_inv:.2e}"
            )
        if not _same(subspace_intersect(Kh.Kh, BkerD, tol), subspace_intersect(target, BkerD, tol)):
            failures.append(f"h={h}: K_h and V*(S_h) differ on B ker D")
    return failures


@register('corollary-last')
def check_controlled_invariant_in_krylov(rng, options):
    """
    With no output, R_h is the largest controlled invariant subspace inside
    im [B ... A^{h-1} B].
    """
    tol = options.tol
    system = _plant(rng, options)
    forbidden = _forbidden(system, REACHABILITY, tol)
    chain = krylov_chain(system.A, system.B, tol)
    failures = []
    for h in range(1, system.n + 1):
        target = vstar_sequence(system, chain.term(h), tol).limit
        R_h = reach_on_Kh(system, _spectrum(rng, h, forbidden), tol, REACHABILITY)
        if not _same(R_h, target):
            failures.append(f"h={h}: R_h has dim {R_h.dim}, V*(R_h) has dim {target.dim}")
    return failures


def _raw_krylov_index(Delta, H, tol):
    ranks = [0]
    block = H
    columns = []
    for _ in range(Delta.shape[0] + 1):
        columns.append(block)
        ranks.append(rank_of(np.hstack(columns), tol))
        if ranks[-1] == ranks[-2]:
            return len(ranks) - 2
        block = Delta @ block
    return len(ranks) - 1


@register('lemma-diag')
def check_diagonal_krylov(rng, options):
    """
    The Krylov index of a diagonal matrix with d distinct values is at most d.
    """
    tol = options.tol
    k = int(rng.integers(1, options.nmax + 1))
    d = int(rng.integers(1, k + 1))
    values = np.linspace(-1.0, 1.0, d) if d > 1 else np.array([rng.uniform(-1.0, 1.0)])
    diagonal = np.concatenate([values, rng.choice(values, k - d)])
    rng.shuffle(diagonal)
    H = rng.standard_normal((k, int(rng.integers(1, MAX_INPUTS + 1))))
    index = diag_krylov_saturation(np.diag(diagonal), H, tol)
    oracle = _raw_krylov_index(np.diag(diagonal), H, tol)
    failures = []
    if index > d:
        failures.append(f"k={k} d={d}: index {index} exceeds d")
    if index != oracle:
        failures.append(f"k={k} d={d}: index {index}, raw Krylov oracle {oracle}")
    return failures


@register('lemma-reach')
def check_self_reachability(rng, options):
    """
    V*(S_h) is its own reachability subspace.
    """
    tol = options.tol
    system = _system(rng, options)
    schain = sstar_sequence(system, tol)
    failures = []
    for h in range(1, system.n + 1):
        target = vstar_sequence(system, schain.term(h), tol).limit
        R = reachability_on(system, target, tol)
        if not _same(R, target):
            failures.append(f"h={h}: reachability on V*(S_h) has dim {R.dim}, expected {target.dim}")
    return failures


@register('lemma-intersection')
def check_intersection_formula(rng, options):
    """
    The Markov-kernel formula agrees with V_i ∩ S_j from the two recursions.
    """
    tol = options.tol
    system = _system(rng, options)
    vchain = vstar_sequence(system, tol=tol)
    schain = sstar_sequence(system, tol)
    failures = []
    for i in range(1, system.n + 1):
        j = int(rng.integers(1, system.n + 1))
        direct = subspace_intersect(vchain.term(i), schain.term(j), tol)
        formula = intersection_formula(system, i, j, tol)
        if not _same(direct, formula):
            failures.append(f"i={i} j={j}: V_i ∩ S_j has dim {direct.dim}, formula {formula.dim}")
    return failures


@register('rstar-identity')
def check_rstar_identity(rng, options):
    """
    R* = V* ∩ S*, with monotone chains that settle within n steps.
    """
    tol = options.tol
    system = _system(rng, options)
    vchain = vstar_sequence(system, tol=tol)
    schain = sstar_sequence(system, tol)
    failures = []
    n = system.n
    if any(a < b for a, b in zip(vchain.dims, vchain.dims[1:])) or vchain.stationary_index > n:
        failures.append(f"V chain {vchain.dims} is not non-increasing within {n} steps")
    if any(a > b for a, b in zip(schain.dims, schain.dims[1:])) or schain.stationary_index > n:
        failures.append(f"S chain {schain.dims} is not non-decreasing within {n} steps")
    R = rstar(system, tol)
    meet = subspace_intersect(vchain.limit, schain.limit, tol)
    if not _same(R, meet):
        failures.append(f"R* has dim {R.dim}, V* ∩ S* has dim {meet.dim}")
    return failures


@register('placement')
def check_placement(rng, options):
    """
    Pole placement on controllable systems reproduces the requested spectrum
    with a real F.
    """
    tol = options.tol
    n, m, _ = _dims(rng, options.nmax)
    system = random_system(GenSpec(n, m, seed=_seed(rng), controllable=True), options.retry_budget, tol)
    spectrum = _spectrum(rng, n, ())
    result = place(system, spectrum, tol)
    failures = []
    if result.cond_V > 1e8:
        logger.debug("Skipping spectrum comparison, cond_V = %.2e", result.cond_V)
        return failures
    limit = REAL_FEEDBACK_LIMIT * max(1.0, float(np.linalg.norm(result.F, 2)))
    if result.imag_part > limit:
        failures.append(f"n={n} m={m}: F from complex eigenvectors has imaginary part {result.imag_part:.2e}")
    A_cl, _ = system.closed_loop(result.F)
    error = _match_spectrum(spectrum.lambdas, scipy.linalg.eigvals(A_cl))
    if error > EIGENVALUE_MATCH:
        failures.append(f"n={n} m={m}: closed-loop spectrum off by {error:.2e}")
    return failures


@register('morse-zeros')
def check_morse_zeros(rng, options):
    """
    The zeros from the structural decomposition drop the rank of the
    Rosenbrock pencil; with square invertible D they are σ(A - B D^-1 C).
    """
    tol = options.tol
    square = rng.random() < 0.5
    system = _system(rng, options, square=square)
    report = invariant_zeros(system, tol)
    failures = []
    if not report.all_confirmed:
        failures.append(f"{report.confirmed.count(False)} zeros do not drop the rank of P(λ)")
    if square and rank_of(system.D, tol) == system.m:
        expected = scipy.linalg.eigvals(system.A - system.B @ np.linalg.solve(system.D, system.C))
        if len(expected) != len(report.zeros):
            failures.append(f"{len(report.zeros)} zeros, expected {len(expected)}")
        elif _match_spectrum(expected, report.zeros) > EIGENVALUE_MATCH:
            failures.append("zeros differ from σ(A - B D^-1 C)")
    return failures


def _run_trial(check, k, options):
    seed = trial_seed(options.seed, k)
    try:
        return seed, CHECKS[check](np.random.default_rng(seed), options)
    except GenerationFailure as exc:
        logger.info("Trial %d of %s skipped: %s", k, check, exc)
        return seed, None
    except (GeokitError, np.linalg.LinAlgError) as exc:
        return seed, [f"{type(exc).__name__}: {exc}"]


def run_check(check, options):
    """
    Runs one check over ``options.trials`` trials.
    """
    if check not in CHECKS:
        raise UnknownOperation(f"Unknown check '{check}'; choose from {', '.join(check_ids())}.")
    report = CheckReport(check=check)
    started = time.perf_counter()
    indices = range(options.trials)
    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            outcomes = list(pool.map(lambda k: _run_trial(check, k, options), indices))
    else:
        outcomes = [_run_trial(check, k, options) for k in indices]
    for seed, failures in outcomes:
        if failures is None:
            report.skipped += 1
            continue
        if failures:
            logger.warning("%s failed for seed %d: %s", check, seed, failures[0])
        report.record(seed, failures)
    report.elapsed = time.perf_counter() - started
    logger.info("%s: %d/%d passed in %.2fs", check, report.passed, report.trials, report.elapsed)
    return report


def run_suite(check_id, options):
    """
    Runs one check, or every registered check for ``all``.
    """
    if check_id == 'all':
        return [run_check(check, options) for check in CHECKS]
    return [run_check(check_id, options)]


def check_ids():
    return list(CHECKS) + ['all']
