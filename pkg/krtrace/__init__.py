from krtrace.core.config import OutputFormat, RunConfig
from krtrace.core.errors import (
    ChartError,
    ConsistencyError,
    EnumerationLimitError,
    ExpressionError,
    FieldError,
    InvalidPointError,
    KRTraceError,
    ReportError,
)
from krtrace.core.gf import FieldCtx, FqElement, make_field
from krtrace.core.localmodel import ModelPoint, classify, enumerate_special_fiber
from krtrace.core.nearby import TraceReport, trace_at
from krtrace.core.verify import VerificationReport, verify_theorem
from krtrace.core.weyl import AdmElement, AdmLabel, enumerate_admissible
from krtrace.cli import cli, parse_args

__version__ = "0.1.0"

__all__ = [
    "FieldCtx",
    "FqElement",
    "make_field",
    "AdmElement",
    "AdmLabel",
    "enumerate_admissible",
    "ModelPoint",
    "classify",
    "enumerate_special_fiber",
    "TraceReport",
    "trace_at",
    "VerificationReport",
    "verify_theorem",
    "RunConfig",
    "OutputFormat",
    "KRTraceError",
    "FieldError",
    "InvalidPointError",
    "EnumerationLimitError",
    "ChartError",
    "ExpressionError",
    "ConsistencyError",
    "ReportError",
    "cli",
    "parse_args",
]
