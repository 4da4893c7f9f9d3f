# eigenstructure/serializers.py
from rest_framework import serializers

import numpy as np

from .exceptions import GeokitError
from .sysmodel import SystemQuad


def matrix_data(M):
    """
    Nested lists for a real matrix, {"re", "im"} lists for a complex one.
    """
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return {'re': M.real.tolist(), 'im': M.imag.tolist()}
    return M.tolist()


def finite_or_none(value):
    value = float(value)
    return value if np.isfinite(value) else None # JSON has no infinity


class ComplexSerializer(serializers.Serializer):
    """
    A real or complex scalar as {"re": ..., "im": ...}.
    """
    re = serializers.FloatField(source='real')
    im = serializers.FloatField(source='imag')


class SubspaceSerializer(serializers.Serializer):
    """
    Dimension, ambient dimension and orthonormal basis (columns) of a subspace.
    """
    dim = serializers.IntegerField()
    ambient_dim = serializers.IntegerField()
    basis = serializers.SerializerMethodField()

    def get_basis(self, obj):
        return matrix_data(obj.basis)


class ChainSerializer(serializers.Serializer):
    """
    A subspace recursion: the dimension of every term and its limit.
    """
    dims = serializers.ListField(child=serializers.IntegerField())
    stationary_index = serializers.IntegerField()
    limit = SubspaceSerializer()


class PencilKernelSerializer(serializers.Serializer):
    eigenvalue = ComplexSerializer(source='lam')
    kind = serializers.CharField()
    q = serializers.IntegerField()
    V = serializers.SerializerMethodField()
    W = serializers.SerializerMethodField()

    def get_V(self, obj):
        return matrix_data(obj.V)

    def get_W(self, obj):
        return matrix_data(obj.W)


class AssignedSerializer(serializers.Serializer):
    """
    One closed-loop eigenpair (λ, v) and the input direction w = F v.
    """
    eigenvalue = ComplexSerializer(source='lam')
    eigenvector = serializers.SerializerMethodField()
    input = serializers.SerializerMethodField()

    def get_eigenvector(self, obj):
        return matrix_data(obj.v)

    def get_input(self, obj):
        return matrix_data(obj.w)


class FeedbackResultSerializer(serializers.Serializer):
    """
    Serializer for FeedbackResult: the feedback matrix and its residuals.
    """
    F = serializers.SerializerMethodField()
    assigned = AssignedSerializer(many=True)
    residual_eig = serializers.FloatField()
    residual_out = serializers.FloatField()
    residual_inv = serializers.FloatField()
    cond_V = serializers.SerializerMethodField()
    imag_part = serializers.FloatField()
    warnings = serializers.ListField(child=serializers.CharField())

    def get_F(self, obj):
        return matrix_data(obj.F)

    def get_cond_V(self, obj):
        return finite_or_none(obj.cond_V)


class ZerosReportSerializer(serializers.Serializer):
    zeros = ComplexSerializer(many=True)
    distinct = ComplexSerializer(many=True)
    normal_rank = serializers.IntegerField()
    confirmed = serializers.ListField(child=serializers.BooleanField())


class MorseSerializer(serializers.Serializer):
    """
    Structural decomposition: coordinate changes, transformed matrices,
    block sizes and the invariant zeros.
    """
    blocks = serializers.DictField(child=serializers.IntegerField())
    inputs_rstar = serializers.IntegerField()
    zeros = ComplexSerializer(many=True)
    residual = serializers.FloatField()
    input_block_full_rank = serializers.BooleanField()
    T = serializers.SerializerMethodField()
    Omega = serializers.SerializerMethodField()
    F = serializers.SerializerMethodField()
    A_bar = serializers.SerializerMethodField()
    B_bar = serializers.SerializerMethodField()
    C_bar = serializers.SerializerMethodField()
    D_bar = serializers.SerializerMethodField()

    def get_T(self, obj):
        return matrix_data(obj.T)

    def get_Omega(self, obj):
        return matrix_data(obj.Omega)

    def get_F(self, obj):
        return matrix_data(obj.F)

    def get_A_bar(self, obj):
        return matrix_data(obj.A_bar)

    def get_B_bar(self, obj):
        return matrix_data(obj.B_bar)

    def get_C_bar(self, obj):
        return matrix_data(obj.C_bar)

    def get_D_bar(self, obj):
        return matrix_data(obj.D_bar)


class KhSerializer(serializers.Serializer):
    """
    K_h with the spectrum it was built from and one kernel per eigenvalue.
    """
    mode = serializers.CharField()
    rank = serializers.IntegerField()
    Kh = SubspaceSerializer()
    spectrum = serializers.SerializerMethodField()
    kernels = PencilKernelSerializer(many=True)

    def get_spectrum(self, obj):
        return ComplexSerializer(obj.spectrum.lambdas, many=True).data


class CheckReportSerializer(serializers.Serializer):
    check = serializers.CharField()
    ok = serializers.BooleanField()
    trials = serializers.IntegerField()
    passed = serializers.IntegerField()
    failed = serializers.IntegerField()
    skipped = serializers.IntegerField()
    first_failing_seed = serializers.IntegerField(allow_null=True)
    details = serializers.ListField(child=serializers.DictField())


class SystemPayloadSerializer(serializers.Serializer):
    """
    Validates a system object posted to the API with the same rules as the
    system file format.
    """
    A = serializers.JSONField()
    B = serializers.JSONField()
    C = serializers.JSONField(required=False)
    D = serializers.JSONField(required=False)

    def validate(self, attrs):
        try:
            attrs['quad'] = SystemQuad.from_dict(dict(attrs))
        except GeokitError as exc:
            raise serializers.ValidationError({'code': exc.code, 'message': str(exc)})
        return attrs


class ComputeRequestSerializer(serializers.Serializer):
    system = SystemPayloadSerializer()
    options = serializers.DictField(required=False, default=dict)
