"""The good Drinfeld case: GL_n with semistable local model x_0 ... x_(n-1) = p.

A special-fiber point is a vector of Oort-Tate parameters with at least one
zero entry; the zero positions S index its stratum. Only the subset
combinatorics is needed, so there is no GL_n alcove machinery here.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, model_validator

from .errors import ConsistencyError, EnumerationLimitError, InvalidPointError
from .gf import FieldCtx, FqElement
from .localmodel import DEFAULT_LIMIT
from .report import Params, StratumResult, TabularReport

logger = logging.getLogger(__name__)

Subset = FrozenSet[int]


@dataclass(frozen=True)
class DrinfeldPoint:
    a: Tuple[FqElement, ...]

    @classmethod
    def from_codes(cls, ctx: FieldCtx, codes: Sequence[int]) -> "DrinfeldPoint":
        return cls(tuple(ctx.from_code(code) for code in codes))

    @property
    def n(self) -> int:
        return len(self.a)

    def codes(self) -> Tuple[int, ...]:
        return tuple(v.code for v in self.a)

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.a) + ")"


def subset_label(subset: Subset) -> str:
    return "{" + ",".join(str(i) for i in sorted(subset)) + "}"


def stratum(point: DrinfeldPoint) -> Subset:
    """Positions of the infinitesimal groups, S = {i : a_i = 0}.

    Raises:
        InvalidPointError: If no parameter vanishes
    """
    zeros = frozenset(i for i, v in enumerate(point.a) if not v)
    if not zeros:
        raise InvalidPointError(f"Point {point} is not on the special fiber")
    return zeros


def trace_drinfeld(point: DrinfeldPoint, ctx: FieldCtx) -> int:
    """Roots of every nonzero parameter, (1-q)^(|S|-1) branches at each."""
    subset = stratum(point)
    count = 1
    for i, v in enumerate(point.a):
        if i not in subset:
            count *= ctx.count_root_solutions(v)
    return count * (1 - ctx.q) ** (len(subset) - 1)


def s_x_drinfeld(point: DrinfeldPoint) -> Tuple[FqElement, ...]:
    one = point.a[0].ctx.one
    return tuple(v if v else one for v in point.a)


def phi_prime_drinfeld(
    t: Sequence[FqElement], subset: Subset, n: int, ctx: FieldCtx
) -> Fraction:
    """(-1)^n (p-1)^(n-|S|) (1-q)^(|S|-n-1) on T_S(F_p) N_r, zero elsewhere."""
    if not subset:
        raise InvalidPointError("The stratum subset must be nonempty")
    if any(ctx.norm(t[i]) != 1 for i in range(n) if i not in subset):
        return Fraction(0)
    k = len(subset)
    return (-1) ** n * (ctx.p - 1) ** (n - k) * Fraction(1 - ctx.q) ** (k - n - 1)


def phi_scaled_drinfeld(
    t: Sequence[FqElement], subset: Subset, n: int, ctx: FieldCtx
) -> int:
    """(q-1)^n phi; the sign (-1)^n turns (q-1)^n into (1-q)^n.

    Raises:
        ConsistencyError: If the scaled value is not an integer
    """
    value = phi_prime_drinfeld(t, subset, n, ctx) * (ctx.q - 1) ** n
    if value.denominator != 1:
        raise ConsistencyError(f"Scaled Drinfeld value {value} is not an integer")
    return int(value)


def drinfeld_points(
    n: int, ctx: FieldCtx, limit: Optional[int] = DEFAULT_LIMIT
) -> Iterator[DrinfeldPoint]:
    """Special-fiber points of F_q^n in lexicographic code order.

    Raises:
        EnumerationLimitError: If q^n exceeds the limit
    """
    if limit is not None and ctx.q**n > limit:
        raise EnumerationLimitError(
            f"q^n = {ctx.q**n} tuples exceeds the enumeration limit {limit}"
        )
    for values in product(ctx.elements(), repeat=n):
        if not all(values):
            yield DrinfeldPoint(values)


def _subsets(n: int) -> List[Subset]:
    return [
        frozenset(c) for k in range(1, n + 1) for c in combinations(range(n), k)
    ]


class DrinfeldWitness(BaseModel):
    point: Tuple[int, ...]
    stratum: str
    trace: int
    phi: int


class DrinfeldReport(TabularReport):
    params: Params
    n: int
    strata: List[StratumResult]
    total: int
    verdict: str
    witness: Optional[DrinfeldWitness] = None

    @model_validator(mode="after")
    def _totals(self) -> "DrinfeldReport":
        if sum(s.count for s in self.strata) != self.total:
            raise ValueError("per-stratum counts do not add up to the total")
        failures = sum(s.failed for s in self.strata)
        if (self.verdict == "pass") != (failures == 0):
            raise ValueError("verdict disagrees with the failure count")
        return self

    def title(self) -> str:
        return f"Drinfeld GL_{self.n} over F_{self.params.q}"

    def summary(self) -> List[str]:
        lines = [f"points: {self.total}", f"verdict: {self.verdict}"]
        if self.witness is not None:
            w = self.witness
            lines.append(
                f"witness: {w.point} in {w.stratum}, trace {w.trace} vs Phi {w.phi}"
            )
        return lines

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["S", "count", "pass", "fail"]
        rows = [
            [s.label, str(s.count), str(s.passed), str(s.failed)] for s in self.strata
        ]
        return header, rows

    def failed(self) -> bool:
        return self.verdict != "pass"


def verify_drinfeld(
    n: int, ctx: FieldCtx, limit: Optional[int] = DEFAULT_LIMIT
) -> DrinfeldReport:
    """Compare the trace with the scaled test function at s_x on every point."""
    subsets = _subsets(n)
    counts = {s: [0, 0] for s in subsets}
    witness: Optional[DrinfeldWitness] = None
    logger.info("Checking Drinfeld GL_%d over F_%d", n, ctx.q)
    for point in drinfeld_points(n, ctx, limit):
        subset = stratum(point)
        trace = trace_drinfeld(point, ctx)
        phi = phi_scaled_drinfeld(s_x_drinfeld(point), subset, n, ctx)
        if trace == phi:
            counts[subset][0] += 1
            continue
        counts[subset][1] += 1
        if witness is None:
            witness = DrinfeldWitness(
                point=point.codes(), stratum=subset_label(subset), trace=trace, phi=phi
            )
    strata = [
        StratumResult.of(subset_label(s), sum(counts[s]), counts[s][0], counts[s][1])
        for s in subsets
    ]
    return DrinfeldReport(
        params=Params(p=ctx.p, r=ctx.r, q=ctx.q),
        n=n,
        strata=strata,
        total=sum(s.count for s in strata),
        verdict="fail" if witness else "pass",
        witness=witness,
    )
