"""Frobenius traces on nearby cycles, computed from the resolution fibers.

At an F_q-point of a semistable model where the special fiber has k branches
through the point, all of them defined over F_q, the semisimple trace is
(1-q)^(k-1). The trace at a local-model point is the sum of these local
traces over the F_q-rational points of the resolution fiber. The fibers are
read from the per-stratum recipes in `charts`; no closed form is used here.
"""

import logging
from collections import Counter
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, model_validator

from krtrace.utils.expr import compile_expression

from .charts import RECIPE_NAMES, RootSegment, SweepSegment, TowerSegment, fiber_recipe
from .errors import ConsistencyError
from .gf import FieldCtx, FqElement
from .localmodel import ModelPoint, classify
from .report import Params, TabularReport
from .weyl import AdmElement, AdmLabel

logger = logging.getLogger(__name__)


def local_trace(branches: int, q: int) -> int:
    """(1-q)^(branches-1) for a tame normal-crossings point.

    Raises:
        ValueError: If branches < 1
    """
    if branches < 1:
        raise ValueError(f"A fiber point has at least one branch, got {branches}")
    return (1 - q) ** (branches - 1)


class FiberSegmentReport(BaseModel):
    description: str
    count: int
    branches: int
    contribution: int


class TraceReport(TabularReport):
    params: Params
    point: Tuple[int, int, int, int, int]
    point_text: str
    stratum: AdmLabel
    length: int
    trace: int
    fiber_detail: List[FiberSegmentReport]

    @model_validator(mode="after")
    def _sums(self) -> "TraceReport":
        q = self.params.q
        for seg in self.fiber_detail:
            if seg.contribution != seg.count * local_trace(seg.branches, q):
                raise ValueError(f"Segment {seg.description!r} has a wrong contribution")
        if self.trace != sum(seg.contribution for seg in self.fiber_detail):
            raise ValueError("trace is not the sum of the segment contributions")
        return self

    def title(self) -> str:
        return f"Nearby-cycles trace over F_{self.params.q}"

    def summary(self) -> List[str]:
        return [
            f"point: {self.point_text}",
            f"stratum: {self.stratum.value} (length {self.length})",
            f"trace: {self.trace}",
        ]

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["segment", "points", "branches", "contribution"]
        rows = [
            [seg.description, str(seg.count), str(seg.branches), str(seg.contribution)]
            for seg in self.fiber_detail
        ]
        return header, rows


def _segment(description: str, count: int, branches: int, q: int) -> FiberSegmentReport:
    return FiberSegmentReport(
        description=description,
        count=count,
        branches=branches,
        contribution=count * local_trace(branches, q),
    )


def _env(point: ModelPoint) -> Dict[str, FqElement]:
    env = point.coords()
    env["lam"] = point.ctx.zero
    return env


def _root_segment(
    seg: RootSegment, env: Dict[str, FqElement], ctx: FieldCtx
) -> List[FiberSegmentReport]:
    count = 1
    for unit in seg.units:
        value = compile_expression(unit, RECIPE_NAMES, ctx.p)(env, ctx)
        count *= ctx.count_root_solutions(value)
    return [_segment(seg.description, count, seg.branches, ctx.q)]


def _sweep_counts(
    seg: SweepSegment, env: Dict[str, FqElement], ctx: FieldCtx
) -> Counter[int]:
    """Rational points over (1:lam), lam != 0, keyed by branch count."""
    unit = compile_expression(seg.unit, RECIPE_NAMES, ctx.p)
    counts: Counter[int] = Counter()
    for lam in ctx.units():
        value = unit({**env, "lam": lam}, ctx)
        if value:
            counts[seg.branches] += ctx.count_root_solutions(value)
        else:
            counts[seg.degenerate_branches] += 1
    return counts


def _sweep_segment(
    seg: SweepSegment, env: Dict[str, FqElement], ctx: FieldCtx
) -> List[FiberSegmentReport]:
    counts = _sweep_counts(seg, env, ctx)
    return [
        _segment(f"{seg.description}, {branches} branches", counts[branches], branches, ctx.q)
        for branches in sorted(counts)
        if counts[branches]
    ]


def s1_sweep_sum(gamma: FqElement, ctx: FieldCtx) -> int:
    """Sum over lam in F_q^x of the traces at (1:lam) in the fiber over c = gamma."""
    seg = fiber_recipe(AdmLabel.S1).segments[0]
    if not isinstance(seg, SweepSegment):
        raise ConsistencyError("The s1 recipe does not start with the (1:lam) sweep")
    env = {name: ctx.zero for name in RECIPE_NAMES}
    env["c"] = gamma
    counts = _sweep_counts(seg, env, ctx)
    return sum(count * local_trace(b, ctx.q) for b, count in counts.items())


# the tower over the worst point


def _layer_branches(alpha: FqElement, delta: FqElement, ctx: FieldCtx) -> Iterator[int]:
    """Branch counts at the points (beta:1), beta in F_q, of one R_(j-1) layer."""
    base = 1 + (not alpha) + (not delta)
    for beta in ctx.elements():
        yield base + (not beta)


def _final_branches(alpha: FqElement, delta: FqElement) -> int:
    return 2 + (not alpha) + (not delta)


def layer_sums(alpha: FqElement, delta: FqElement, ctx: FieldCtx) -> List[int]:
    """Trace sum of each layer j = 1..p-2, computed point by point."""
    return [
        sum(local_trace(b, ctx.q) for b in _layer_branches(alpha, delta, ctx))
        for _ in range(1, ctx.p - 1)
    ]


def tower_trace_E0(alpha: FqElement, delta: FqElement, ctx: FieldCtx) -> int:
    """Trace over the tower E_0 -> E_(p-2) above one point (alpha, delta).

    Raises:
        ConsistencyError: If some layer does not sum to zero
    """
    sums = layer_sums(alpha, delta, ctx)
    for j, total in enumerate(sums, start=1):
        if total != 0:
            raise ConsistencyError(
                f"Layer {j} over ({alpha}, {delta}) sums to {total}, expected 0"
            )
    return sum(sums) + local_trace(_final_branches(alpha, delta), ctx.q)


def projective_line(ctx: FieldCtx) -> List[Optional[FqElement]]:
    """P^1(F_q) as the finite values followed by None for the point at infinity."""
    return [*ctx.elements(), None]


def _affine(value: Optional[FqElement], ctx: FieldCtx) -> FqElement:
    return ctx.zero if value is None else value


def tower_sum(ctx: FieldCtx) -> int:
    line = projective_line(ctx)
    return sum(
        tower_trace_E0(_affine(alpha, ctx), _affine(delta, ctx), ctx)
        for alpha in line
        for delta in line
    )


def _tower_segment(seg: TowerSegment, ctx: FieldCtx) -> List[FiberSegmentReport]:
    line = projective_line(ctx)
    counts: Counter[int] = Counter()
    for alpha in line:
        for delta in line:
            a, d = _affine(alpha, ctx), _affine(delta, ctx)
            for _ in range(1, ctx.p - 1):
                counts.update(_layer_branches(a, d, ctx))
            counts[_final_branches(a, d)] += 1
    detail = [
        _segment(f"{seg.description} tower, {b} branches", counts[b], b, ctx.q)
        for b in sorted(counts)
    ]
    total = tower_sum(ctx)
    if sum(s.contribution for s in detail) != total:
        raise ConsistencyError(f"Tower detail does not add up to the tower trace {total}")
    return detail


def trace_bound(ctx: FieldCtx) -> int:
    q, p = ctx.q, ctx.p
    return (q - 1) ** 3 + (p - 1) * q * (q - 1)


def trace_at(point: ModelPoint, elem: Optional[AdmElement] = None) -> TraceReport:
    """Trace of Frobenius on the pushed-forward nearby cycles at point.

    Args:
        point: A special-fiber point
        elem: Its stratum, when the caller has already classified it

    Raises:
        InvalidPointError: If the point is off the special fiber
        ConsistencyError: If a tower layer or the magnitude bound fails
    """
    ctx = point.ctx
    if elem is None:
        elem = classify(point)
    env = _env(point)
    detail: List[FiberSegmentReport] = []
    for seg in fiber_recipe(elem.label).segments:
        if isinstance(seg, RootSegment):
            detail += _root_segment(seg, env, ctx)
        elif isinstance(seg, SweepSegment):
            detail += _sweep_segment(seg, env, ctx)
        else:
            detail += _tower_segment(seg, ctx)

    trace = sum(seg.contribution for seg in detail)
    if abs(trace) > trace_bound(ctx):
        raise ConsistencyError(f"Trace {trace} at {point} exceeds the bound {trace_bound(ctx)}")
    logger.debug("Trace at %s (%s): %d", point, elem, trace)
    return TraceReport(
        params=Params(p=ctx.p, r=ctx.r, q=ctx.q),
        point=point.codes(),  # type: ignore[arg-type]
        point_text=str(point),
        stratum=elem.label,
        length=elem.length,
        trace=trace,
        fiber_detail=detail,
    )
