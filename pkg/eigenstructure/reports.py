# eigenstructure/reports.py
"""
The compute operations behind both the management command and the API.

Every operation takes a SystemQuad and the cleaned options and returns
(result, diagnostics) as JSON-ready data; ``build_report`` wraps them in
the report envelope.
"""
import hashlib
import json
import logging
from dataclasses import dataclass

from .assignment import build_Kh, min_distinct_spectrum, place, reach_on_Kh
from .conf import geokit_setting
from .exceptions import SpectrumError, UnknownOperation
from .geometry import (
    friend_of,
    is_output_nulling,
    morse_decomposition,
    reachable_subspace,
    rstar,
    sstar_sequence,
    unobservable_subspace,
    vstar_sequence,
)
from .linalg import DEFAULT_TOL, subspace_distance, subspace_intersect
from .pencils import invariant_zeros, uncontrollable_eigenvalues
from .serializers import (
    ChainSerializer,
    ComplexSerializer,
    FeedbackResultSerializer,
    KhSerializer,
    MorseSerializer,
    SubspaceSerializer,
    ZerosReportSerializer,
)

logger = logging.getLogger(__name__)

OPERATIONS = {}


@dataclass(frozen=True)
class ComputeOptions:
    tol: object = DEFAULT_TOL
    lambdas: object = None
    mode: str | None = None

    @classmethod
    def from_form(cls, form):
        return cls(
            tol=form.tolerance(),
            lambdas=form.cleaned_data.get('lambdas'),
            mode=form.cleaned_data.get('mode'),
        )

    def flags(self):
        """
        Canonical form of the flags for the inputs digest.
        """
        return {
            'tol_rel': self.tol.rel,
            'tol_abs': self.tol.abs,
            'lambdas': None if self.lambdas is None else [
                [complex(z).real, complex(z).imag] for z in self.lambdas.lambdas
            ],
            'mode': self.mode,
        }

    def require_lambdas(self, op):
        if self.lambdas is None:
            raise SpectrumError(f"'{op}' needs --lambdas.")
        return self.lambdas


def operation(name, description):
    """
    Registers a compute operation under ``name``.
    """
    def decorator(func):
        func.description = description
        OPERATIONS[name] = func
        return func
    return decorator


@operation('reach', "Reachable subspace <A | im B> and its Krylov index.")
def compute_reach(system, options):
    result = reachable_subspace(system.A, system.B, options.tol)
    data = SubspaceSerializer(result.subspace).data
    data['index'] = result.index
    return data, {}


@operation('unobs', "Unobservable subspace of (C, A).")
def compute_unobs(system, options):
    return SubspaceSerializer(unobservable_subspace(system.C, system.A, options.tol)).data, {}


@operation('vstar', "V* recursion (largest output-nulling subspace).")
def compute_vstar(system, options):
    return ChainSerializer(vstar_sequence(system, tol=options.tol)).data, {}


@operation('sstar', "S* recursion (smallest input-containing subspace).")
def compute_sstar(system, options):
    return ChainSerializer(sstar_sequence(system, options.tol)).data, {}


@operation('rstar', "R*, the largest output-nulling reachability subspace.")
def compute_rstar(system, options):
    R = rstar(system, options.tol)
    meet = subspace_intersect(vstar_sequence(system, tol=options.tol).limit,
                              sstar_sequence(system, options.tol).limit, options.tol)
    return SubspaceSerializer(R).data, {'identity_residual': _finite(subspace_distance(R, meet))}


@operation('zeros', "Invariant zeros from the structural decomposition.")
def compute_zeros(system, options):
    report = invariant_zeros(system, options.tol)
    data = ZerosReportSerializer(report).data
    return {'zeros': data['zeros'], 'distinct': data['distinct']}, {
        'normal_rank': data['normal_rank'],
        'confirmed': data['confirmed'],
    }


@operation('uncontrollable', "Eigenvalues of A that fail the PBH rank test.")
def compute_uncontrollable(system, options):
    values = uncontrollable_eigenvalues(system.A, system.B, options.tol)
    return {'eigenvalues': ComplexSerializer(values, many=True).data}, {}


@operation('morse', "Structural decomposition with respect to R* and V*.")
def compute_morse(system, options):
    decomposition = morse_decomposition(system, options.tol)
    return MorseSerializer(decomposition).data, {'residual': decomposition.residual}


@operation('kh', "K_h spanned by the pencil kernels at the given eigenvalues.")
def compute_kh(system, options):
    spectrum = options.require_lambdas('kh')
    result = build_Kh(system, spectrum, options.tol, options.mode)
    diagnostics = {'h': len(spectrum)}
    if system.has_output and result.mode == 'rosenbrock':
        diagnostics['output_nulling'] = is_output_nulling(system, result.Kh, options.tol)
        diagnostics['reachability_dim'] = reach_on_Kh(system, spectrum, options.tol, result.mode).dim
    return KhSerializer(result).data, diagnostics


@operation('place', "Pole placement on the reachable subspace.")
def compute_place(system, options):
    result = place(system, options.require_lambdas('place'), options.tol, geokit_setting('COND_WARN'))
    return FeedbackResultSerializer(result).data, _feedback_diagnostics(result)


@operation('friend', "Friend of V*, or of K_h with the given eigenvalues.")
def compute_friend(system, options):
    if options.lambdas is None:
        subspace = vstar_sequence(system, tol=options.tol).limit
        result = friend_of(system, subspace, None, options.tol, geokit_setting('COND_WARN'))
    else:
        kh = build_Kh(system, options.lambdas, options.tol, options.mode)
        target = system if kh.mode == 'rosenbrock' else system.without_output()
        subspace = kh.Kh
        result = friend_of(target, subspace, kh.spectrum, options.tol, geokit_setting('COND_WARN'))
    diagnostics = _feedback_diagnostics(result)
    diagnostics['subspace_dim'] = subspace.dim
    return FeedbackResultSerializer(result).data, diagnostics


@operation('minspec', "Smallest number of distinct eigenvalues that saturates K_h.")
def compute_minspec(system, options):
    mode = options.mode or ('rosenbrock' if system.has_output else 'reachability')
    return {'h': min_distinct_spectrum(system, mode, options.tol), 'mode': mode}, {}


def _finite(value):
    return value if value != float('inf') else None


def _feedback_diagnostics(result):
    return {
        'ill_conditioned': result.cond_V > geokit_setting('COND_WARN'),
        'max_residual': max(result.residual_eig, result.residual_out, result.residual_inv),
    }


def inputs_digest(op, system, options):
    canonical = json.dumps(
        {'op': op, 'system': system.to_dict(), 'flags': options.flags()},
        sort_keys=True, separators=(',', ':'),
    )
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def build_report(op, system, options):
    """
    Runs one operation and returns the report envelope.
    """
    if op not in OPERATIONS:
        raise UnknownOperation(f"Unknown operation '{op}'; choose from {', '.join(OPERATIONS)}.")
    logger.debug("Running %s on %r", op, system)
    result, diagnostics = OPERATIONS[op](system, options)
    return {
        'op': op,
        'inputs_digest': inputs_digest(op, system, options),
        'result': result,
        'diagnostics': diagnostics,
    }


def error_report(op, exc):
    return {'op': op, 'error': exc.as_dict()}


def render(report, indent=2):
    return json.dumps(report, indent=indent)


def operation_list():
    return [{'op': name, 'description': func.description} for name, func in OPERATIONS.items()]
