import logging

from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import status, viewsets
from rest_framework.exceptions import ValidationError
from rest_framework.response import Response
from rest_framework.views import APIView

from common.helper import load_data
from harness.helper import evolve_document, resolve_document
from harness.models import SuiteRun
from harness.serializers import (EvolveRequestSerializer, ResolveRequestSerializer,
                                 SuiteRunSerializer)
from resolvent.evolution import evolve_path
from resolvent.solvers import resolvent

logger = logging.getLogger(__name__)


def error_response(e):
    if isinstance(e, DjangoValidationError):
        return Response({'error': ' '.join(e.messages)}, status=status.HTTP_400_BAD_REQUEST)
    return Response(e.detail, status=status.HTTP_400_BAD_REQUEST)


class SuiteRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Saved verification runs, newest first.
    """
    queryset = SuiteRun.objects.all()
    serializer_class = SuiteRunSerializer


class ResolveView(APIView):
    """
    Solve one resolvent problem.

    The body is a ``ResolveRequestSerializer`` document. A solve that stops
    short of the tolerance is still answered with 200 and
    ``"converged": false`` in the result.
    """

    def post(self, request):
        try:
            problem = load_data(ResolveRequestSerializer, request.data)
            result = resolvent(problem['functional'], problem['lam'], problem['f'],
                               problem['solver'])
        except (DjangoValidationError, ValidationError) as e:
            return error_response(e)
        return Response(resolve_document(problem, result), status=status.HTTP_200_OK)


class EvolveView(APIView):
    """
    Implicit Euler ``(J_{t/steps})^steps f``.
    """

    def post(self, request):
        try:
            problem = load_data(EvolveRequestSerializer, request.data)
            path = evolve_path(problem['functional'], problem['t'], problem['steps'],
                               problem['f'], problem['solver'])
        except (DjangoValidationError, ValidationError) as e:
            return error_response(e)
        document = evolve_document(problem, path)
        if not document['converged']:
            logger.info('evolve request stopped after %d of %d steps', document['steps'],
                        problem['steps'])
        return Response(document, status=status.HTTP_200_OK)
