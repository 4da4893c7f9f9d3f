# eigenstructure/api_views.py
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from .exceptions import GeokitError, InputError, NumericalError
from .forms import ComputeOptionsForm, validated
from .reports import ComputeOptions, build_report, error_report, operation_list
from .serializers import ComputeRequestSerializer


class OperationListView(APIView):
    """
    Lists the operations available under /api/compute/<op>/.
    """
    def get(self, request):
        return Response({'operations': operation_list()})


class ComputeView(APIView):
    """
    Runs one compute operation on the posted system.
    Body: {"system": {"A": ..., "B": ..., "C": ..., "D": ...}, "options": {...}}.
    Returns the same report envelope as the compute command.
    """
    def post(self, request, op):
        serializer = ComputeRequestSerializer(data=request.data)
        if not serializer.is_valid():
            # Payload problems are input errors, reported in the CLI error shape
            error = InputError(_flatten(serializer.errors))
            return Response(error_report(op, error), status=status.HTTP_400_BAD_REQUEST)
        try:
            form = validated(ComputeOptionsForm(data=serializer.validated_data['options']))
            options = ComputeOptions.from_form(form)
            report = build_report(op, serializer.validated_data['system']['quad'], options)
        except InputError as exc:
            return Response(error_report(op, exc), status=status.HTTP_400_BAD_REQUEST)
        except NumericalError as exc:
            return Response(error_report(op, exc), status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        except GeokitError as exc: # Anything else in the hierarchy
            return Response(error_report(op, exc), status=status.HTTP_400_BAD_REQUEST)
        return Response(report)


def _flatten(errors, prefix=''):
    """
    Turns DRF's nested error dict into one readable message.
    """
    parts = []
    for key, value in errors.items():
        label = f"{prefix}{key}"
        if isinstance(value, dict):
            parts.append(_flatten(value, f"{label}."))
        else:
            parts.append(f"{label}: {' '.join(str(v) for v in value)}")
    return '; '.join(parts)
