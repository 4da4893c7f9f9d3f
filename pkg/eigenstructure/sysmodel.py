# eigenstructure/sysmodel.py
"""
The system quadruple (A, B, C, D), its file format and the seeded random
generator behind the verification suites.
"""
import json
import logging
import math
import numbers
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import ortho_group

from .exceptions import (
    DimensionMismatch,
    EmptyOutputError,
    GenerationFailure,
    InvalidGenSpec,
    MalformedSystemFile,
    NonFiniteEntry,
)
from .linalg import DEFAULT_TOL, as_matrix

logger = logging.getLogger(__name__)

RETRY_BUDGET = 100


@dataclass(frozen=True, eq=False)
class SystemQuad:
    """
    A real LTI system x' = A x + B u, y = C x + D u.

    p = 0 (C of shape (0, n), D of shape (0, m)) means "no output": the
    output-nulling notions then reduce to plain controlled invariance.
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, name='A')
        n = A.shape[0]
        if A.shape[1] != n:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}.")
        if n < 1:
            raise DimensionMismatch("The state dimension n must be at least 1.")
        B = as_matrix(self.B, rows=n, name='B')
        m = B.shape[1]
        if m < 1:
            raise DimensionMismatch("The input dimension m must be at least 1.")
        if np.size(self.C) == 0 and np.size(self.D) == 0:
            C, D = np.zeros((0, n)), np.zeros((0, m))
        else:
            C = as_matrix(self.C, cols=n, name='C')
            D = as_matrix(self.D, rows=C.shape[0], cols=m, name='D')
        for name, value in (('A', A), ('B', B), ('C', C), ('D', D)):
            if np.iscomplexobj(value):
                raise DimensionMismatch(f"{name} must be real.")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def from_matrices(cls, A, B, C=None, D=None):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        n, m = A.shape[0], B.shape[1]
        if C is None and D is None:
            return cls(A, B, np.zeros((0, n)), np.zeros((0, m)))
        C = np.atleast_2d(np.asarray(C, dtype=float))
        D = np.zeros((C.shape[0], m)) if D is None else np.atleast_2d(np.asarray(D, dtype=float))
        return cls(A, B, C, D)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    @property
    def has_output(self):
        return self.p > 0

    def require_output(self, operation):
        if not self.has_output:
            raise EmptyOutputError(f"{operation} needs an output (p >= 1); C and D are empty.")

    def without_output(self):
        return SystemQuad(self.A, self.B, np.zeros((0, self.n)), np.zeros((0, self.m)))

    def closed_loop(self, F):
        """
        Returns (A + B F, C + D F).
        """
        return self.A + self.B @ F, self.C + self.D @ F

    def stacked_state_map(self):
        """
        [A; C]
        """
        return np.vstack([self.A, self.C])

    def stacked_input_map(self):
        """
        [B; D]
        """
        return np.vstack([self.B, self.D])

    def to_dict(self):
        data = {'A': self.A.tolist(), 'B': self.B.tolist()}
        if self.has_output:
            data['C'] = self.C.tolist()
            data['D'] = self.D.tolist()
        return data

    @classmethod
    def from_dict(cls, data):
        """
        Builds a system from the decoded JSON object of the file format.
        """
        if not isinstance(data, dict):
            raise MalformedSystemFile("A system must be a JSON object.")
        for key in ('A', 'B'):
            if key not in data:
                raise MalformedSystemFile(f"Missing required key '{key}'.")
        if ('C' in data) != ('D' in data):
            raise MalformedSystemFile("'C' and 'D' must be present together or absent together.")
        A = _matrix_from_rows(data['A'], 'A')
        B = _matrix_from_rows(data['B'], 'B')
        if 'C' in data:
            return cls(A, B, _matrix_from_rows(data['C'], 'C'), _matrix_from_rows(data['D'], 'D'))
        return cls.from_matrices(A, B)

    def __repr__(self):
        return f"SystemQuad(n={self.n}, m={self.m}, p={self.p})"


def _matrix_from_rows(rows, name):
    if not isinstance(rows, list) or not rows:
        raise DimensionMismatch(f"'{name}' must be a non-empty array of rows.")
    if not all(isinstance(row, list) and row for row in rows):
        raise DimensionMismatch(f"Every row of '{name}' must be a non-empty array.")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise DimensionMismatch(f"Rows of '{name}' have different lengths.")
    for row in rows:
        for x in row:
            if isinstance(x, bool) or not isinstance(x, numbers.Real):
                raise MalformedSystemFile(f"'{name}' contains a non-numeric entry: {x!r}.")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"'{name}' contains NaN or infinite entries.")
    return arr


def load_system(path):
    """
    Reads and validates a system file (UTF-8 JSON with keys A, B and
    optionally C and D together).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise MalformedSystemFile(f"Cannot read system file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSystemFile(f"{path} is not valid JSON: {exc}") from exc
    system = SystemQuad.from_dict(data)
    logger.debug("Loaded %r from %s", system, path)
    return system


def dump_system(system, path):
    Path(path).write_text(json.dumps(system.to_dict(), indent=2), encoding='utf-8')


def dual_of(system):
    """
    The dual quadruple (A^T, C^T, B^T, D^T).
    """
    system.require_output('dual_of')
    return SystemQuad(system.A.T, system.C.T, system.B.T, system.D.T)


@dataclass(frozen=True)
class GenSpec:
    """
    Parameters of a random system.

    ``reachable_dim`` builds an uncontrollable pair with exactly that
    reachable dimension, ``target_dim_rstar`` a system whose largest
    output-nulling reachability subspace has that dimension. ``normalize``
    divides A by sqrt(n) so that its spectral radius stays near one.
    """
    n: int
    m: int
    p: int = 0
    seed: int = 0
    controllable: bool = False
    target_dim_rstar: int | None = None
    reachable_dim: int | None = None
    feedthrough: bool = True
    normalize: bool = True

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.p < 0:
            raise InvalidGenSpec("Require n >= 1, m >= 1 and p >= 0.")
        if self.m > self.n:
            raise InvalidGenSpec(f"m = {self.m} exceeds n = {self.n}.")
        if self.p > self.n:
            raise InvalidGenSpec(f"p = {self.p} exceeds n = {self.n}.")
        if self.reachable_dim is not None:
            if not 0 <= self.reachable_dim <= self.n:
                raise InvalidGenSpec("reachable_dim must lie in 0..n.")
            if self.controllable and self.reachable_dim < self.n:
                raise InvalidGenSpec("A controllable system has reachable_dim = n.")
            if self.reachable_dim < self.n and self.target_dim_rstar is not None:
                raise InvalidGenSpec("reachable_dim and target_dim_rstar cannot be combined.")
        if self.target_dim_rstar is not None:
            k = self.target_dim_rstar
            if self.p < 1:
                raise InvalidGenSpec("target_dim_rstar needs p >= 1.")
            if not 0 <= k <= self.n:
                raise InvalidGenSpec("target_dim_rstar must lie in 0..n.")
            if k == 0 and self.m > self.p:
                raise InvalidGenSpec("dim R* = 0 by construction needs m <= p.")

    def _rstar_inputs(self):
        """
        Number of inputs that drive the R* block.
        """
        if not self.target_dim_rstar:
            return 0
        return max(1, self.m - self.p)


def _gaussian(rng, rows, cols):
    return rng.standard_normal((rows, cols))


def _state_matrix(rng, n, normalize):
    A = _gaussian(rng, n, n)
    return A / math.sqrt(n) if normalize else A


def _draw(spec, rng):
    n, m, p = spec.n, spec.m, spec.p
    if spec.target_dim_rstar is not None:
        return _draw_with_rstar(spec, rng)
    if spec.reachable_dim is not None and spec.reachable_dim < n:
        A, B = _draw_uncontrollable_pair(spec, rng)
    else:
        A = _state_matrix(rng, n, spec.normalize)
        B = _gaussian(rng, n, m)
    C = _gaussian(rng, p, n)
    D = _gaussian(rng, p, m) if spec.feedthrough else np.zeros((p, m))
    return SystemQuad(A, B, C, D)


def _draw_uncontrollable_pair(spec, rng):
    """
    Kalman form [[A11, A12], [0, A22]], [B1; 0] with dim R = reachable_dim,
    hidden behind a random orthogonal change of coordinates.
    """
    n, m, r = spec.n, spec.m, spec.reachable_dim
    A = _state_matrix(rng, n, spec.normalize)
    A[r:, :r] = 0.0
    B = np.zeros((n, m))
    B[:r] = _gaussian(rng, r, m)
    if r == 0:
        B[:] = 0.0
    T = ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
    return T @ A @ T.T, T @ B


def _draw_with_rstar(spec, rng):
    """
    Block form in which x1 (dimension k) is reachable through u1 without
    ever reaching the output, while the remaining inputs u2 all reach the
    output through a full-column-rank D2. This gives dim R* = k exactly.
    """
    n, m, p, k = spec.n, spec.m, spec.p, spec.target_dim_rstar
    m1 = spec._rstar_inputs()
    m2 = m - m1
    A = _state_matrix(rng, n, spec.normalize)
    A[k:, :k] = 0.0
    B = np.zeros((n, m))
    B[:, m1:] = _gaussian(rng, n, m2)
    B[:k, :m1] = _gaussian(rng, k, m1)
    C = np.zeros((p, n))
    C[:, k:] = _gaussian(rng, p, n - k)
    D = np.zeros((p, m))
    D[:, m1:] = _gaussian(rng, p, m2)
    T = ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
    W = ortho_group.rvs(m, random_state=rng) if m > 1 else np.eye(1)
    return SystemQuad(T @ A @ T.T, T @ B @ W, C @ T.T, D @ W)


def random_system(spec, retry_budget=RETRY_BUDGET, tol=DEFAULT_TOL):
    """
    Draws a system from a standard-normal ensemble, deterministically in
    spec.seed. With ``controllable`` set, resamples until the n-block
    controllability matrix has rank n.
    """
    from .geometry import reachable_subspace

    rng = np.random.default_rng(spec.seed)
    for attempt in range(retry_budget):
        system = _draw(spec, rng)
        if not spec.controllable:
            return system
        if reachable_subspace(system.A, system.B, tol).subspace.is_full:
            if attempt:
                logger.debug("Controllable draw after %d retries (seed %d)", attempt, spec.seed)
            return system
    raise GenerationFailure(
        f"No controllable system after {retry_budget} draws for {spec}."
    )

