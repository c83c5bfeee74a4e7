from enum import Enum
from pathlib import Path
from typing import Optional, Tuple

import sympy
from pydantic import BaseModel, Field, field_validator, model_validator

from .gf import MAX_DEGREE
from .localmodel import DEFAULT_LIMIT
from .weyl import AdmLabel


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"


class Command(str, Enum):
    ADM = "adm"
    STRATA = "strata"
    TRACE = "trace"
    PHI = "phi"
    ATLAS = "atlas"
    DRINFELD = "drinfeld"
    VERIFY = "verify"
    IDENTITIES = "identities"


def check_odd_prime(p: int) -> int:
    if p == 2 or not sympy.isprime(p):
        raise ValueError("p must be an odd prime")
    return p


class RunConfig(BaseModel):
    """Validated configuration for one CLI run"""

    command: Command
    p: Optional[int] = None
    r: int = 1
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[Path] = None
    limit: int = Field(default=DEFAULT_LIMIT, ge=1)
    workers: int = Field(default=1, ge=1)
    force: bool = False
    timing: bool = True
    point: Optional[Tuple[int, int, int, int, int]] = None
    s: Optional[Tuple[int, int, int, int]] = None
    w: Optional[AdmLabel] = None
    n: Optional[int] = Field(default=None, ge=1)
    validate_charts: bool = False

    @field_validator("p")
    @classmethod
    def _odd_prime(cls, p: Optional[int]) -> Optional[int]:
        return None if p is None else check_odd_prime(p)

    @field_validator("r")
    @classmethod
    def _degree(cls, r: int) -> int:
        if not 1 <= r <= MAX_DEGREE:
            raise ValueError(f"r must satisfy 1 <= r <= {MAX_DEGREE}")
        return r

    @property
    def q(self) -> Optional[int]:
        return None if self.p is None else self.p**self.r

    @property
    def effective_limit(self) -> Optional[int]:
        """None means unlimited (--force)."""
        return None if self.force else self.limit

    @model_validator(mode="after")
    def _codes_in_range(self) -> "RunConfig":
        q = self.q
        for name in ("point", "s"):
            codes = getattr(self, name)
            if codes is None:
                continue
            if q is None:
                raise ValueError(f"{name} requires p")
            if any(not 0 <= code < q for code in codes):
                raise ValueError(f"{name} codes must lie in [0, {q})")
        return self
