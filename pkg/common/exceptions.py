from django.core.exceptions import ValidationError


class LabError(ValidationError):
    """
    Base class of every domain error raised by the lab.

    Subclasses fix a stable ``code`` so that serializers, API views and
    management commands can report failures uniformly.
    """
    default_code = 'lab_error'

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code=code or self.default_code, params=params)


class DomainMismatchError(LabError):
    default_code = 'domain_mismatch'


class InvalidBandError(LabError):
    default_code = 'invalid_band'


class InvalidParameterError(LabError):
    default_code = 'invalid_parameter'


class NotNormalContractionError(LabError):
    default_code = 'not_normal'


class NotIncreasingContractionError(LabError):
    default_code = 'not_increasing'


class InvalidEdgeFunctionError(LabError):
    default_code = 'invalid_edge_function'


class InvalidFunctionalError(LabError):
    default_code = 'invalid_functional'


class ImproperCenterError(LabError):
    default_code = 'improper_center'


class NotHomogeneousError(LabError):
    default_code = 'not_homogeneous'


class UnknownCheckError(LabError):
    default_code = 'unknown_check'


class InvalidInstanceSpecError(LabError):
    default_code = 'invalid_instance_spec'


class SolverDidNotConverge(LabError):
    default_code = 'not_converged'

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
