# eigenstructure/exceptions.py
"""
Error hierarchy shared by the numerical modules, the management commands and
the API view.

Every error carries a machine-readable ``code`` and the process ``exit_code``
the command line uses for it: 1 for bad input, 2 for numerical failures.
"""


class GeokitError(Exception):
    """
    Base class for every error raised by the toolkit.
    """
    code = 'error'
    exit_code = 1

    def as_dict(self):
        return {'code': self.code, 'message': str(self)}


# Input and validation errors (exit code 1)

class InputError(GeokitError):
    code = 'input_error'
    exit_code = 1


class MalformedSystemFile(InputError):
    code = 'malformed_system_file'


class DimensionMismatch(InputError):
    code = 'dimension_mismatch'


class NonFiniteEntry(InputError):
    code = 'non_finite_entry'


class InvalidGenSpec(InputError):
    code = 'invalid_gen_spec'


class EmptyOutputError(InputError):
    """
    Raised when an operation needs p >= 1 but the system has no output.
    """
    code = 'empty_output'


class AmbientMismatch(InputError):
    code = 'ambient_mismatch'


class SpectrumError(InputError):
    code = 'invalid_spectrum'


class DuplicateEigenvalue(SpectrumError):
    code = 'duplicate_lambda'


class NotSelfConjugate(SpectrumError):
    code = 'not_self_conjugate'


class TooCloseToForbidden(SpectrumError):
    code = 'too_close_to_forbidden'


class NonDiagonalInput(InputError):
    code = 'non_diagonal_input'


class UnknownOperation(InputError):
    code = 'unknown_operation'


# Numerical failures (exit code 2)

class NumericalError(GeokitError):
    code = 'numerical_error'
    exit_code = 2


class GenerationFailure(NumericalError):
    code = 'generation_failure'


class NotOutputNulling(NumericalError):
    code = 'not_output_nulling'


class SpectrumNotAssignable(NumericalError):
    code = 'spectrum_not_assignable'


class DependentSelection(NumericalError):
    code = 'dependent_selection'


class NonSelfConjugateSelection(NumericalError):
    code = 'non_self_conjugate_selection'


class DecompositionResidualError(NumericalError):
    code = 'decomposition_residual'


class FriendDependenceError(NumericalError):
    code = 'friend_dependence'
