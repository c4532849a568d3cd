import functools

from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers


def handle_exceptions(func):
    """
    Re-raise domain errors from ``func`` as DRF validation errors so that
    serializers and API views answer with HTTP 400.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DjangoValidationError as e:
            code = getattr(e, 'code', None) or 'invalid'
            raise serializers.ValidationError({'error': ' '.join(e.messages)}, code=code)
    return wrapper
