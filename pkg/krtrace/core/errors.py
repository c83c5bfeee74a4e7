class KRTraceError(Exception):
    """Base exception for all krtrace errors"""

    pass


class FieldError(KRTraceError):
    """Raised when field parameters are invalid or elements come from different fields"""

    pass


class InvalidPointError(KRTraceError):
    """Raised when a point does not lie on the required special fiber"""

    pass


class EnumerationLimitError(KRTraceError):
    """Raised when an exhaustive enumeration would exceed the configured limit"""

    pass


class ChartError(KRTraceError):
    """Raised when a chart record is malformed"""

    pass


class ExpressionError(KRTraceError):
    """Raised when a chart or recipe expression cannot be compiled"""

    pass


class ConsistencyError(KRTraceError):
    """Raised when an internal invariant fails; this always indicates a bug"""

    pass


class ReportError(KRTraceError):
    """Raised when a report cannot be written"""

    pass
