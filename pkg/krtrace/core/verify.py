"""Whole-fiber checks: the trace comparison, the stratum census and the identity suite."""

import concurrent.futures
import logging
import random
import time
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, model_validator

from .errors import ConsistencyError
from .gf import FieldCtx, make_field
from .hecke import phi_scaled, s_x
from .localmodel import (
    DEFAULT_LIMIT,
    OT_PATTERNS,
    ModelPoint,
    check_enumeration_limit,
    classify,
    classify_by_minors,
    containment_defects,
    enumerate_special_fiber,
    matrix_chain,
    ot_params,
    special_fiber_size,
)
from .nearby import TraceReport, layer_sums, trace_at
from .report import Params, StratumResult, TabularReport
from .weyl import AdmElement, AdmLabel, enumerate_admissible

logger = logging.getLogger(__name__)

Codes = Tuple[int, ...]
Verdict = Literal["pass", "fail"]


def _params(ctx: FieldCtx) -> Params:
    return Params(p=ctx.p, r=ctx.r, q=ctx.q)


# admissible set


class AdmissibleRow(BaseModel):
    label: AdmLabel
    length: int
    decomposition: str
    t0: str
    t1: str
    t2: str
    translation: str
    duality: int


class AdmissibleTable(TabularReport):
    rows: List[AdmissibleRow]

    def title(self) -> str:
        return "Admissible set for GSp4, mu = (1,1,0,0)"

    def summary(self) -> List[str]:
        return [f"elements: {len(self.rows)}"]

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["w", "length", "decomposition", "t0", "t1", "t2", "x0", "d"]
        rows = [
            [
                row.label.value,
                str(row.length),
                row.decomposition,
                row.t0,
                row.t1,
                row.t2,
                row.translation,
                str(row.duality),
            ]
            for row in self.rows
        ]
        return header, rows


def _bits(v: Sequence[int]) -> str:
    return "".join(str(c) for c in v)


def admissible_table() -> AdmissibleTable:
    rows = []
    for elem in enumerate_admissible():
        duality = elem.alcove.duality_constant()
        if duality is None:
            raise ConsistencyError(f"Alcove of {elem} has no duality constant")
        rows.append(
            AdmissibleRow(
                label=elem.label,
                length=elem.length,
                decomposition=elem.decomposition,
                t0=_bits(elem.diff[0]),
                t1=_bits(elem.diff[1]),
                t2=_bits(elem.diff[2]),
                translation=_bits(elem.translation),
                duality=duality,
            )
        )
    return AdmissibleTable(rows=rows)


# census


def predicted_count(label: AdmLabel, q: int) -> int:
    """Closed-form stratum sizes, used as a cross-check on the census."""
    length = {elem.label: elem.length for elem in enumerate_admissible()}[label]
    if label in (AdmLabel.S010, AdmLabel.S212):
        return (q - 1) * (q * q - q + 1)
    return (q - 1) ** (3 if length == 3 else length)


def stratum_census(
    ctx: FieldCtx, limit: Optional[int] = DEFAULT_LIMIT
) -> Dict[AdmLabel, int]:
    """Points per stratum, in admissible-set order, zeros included."""
    counts = {label: 0 for label in AdmLabel}
    for point in enumerate_special_fiber(ctx, limit):
        counts[classify(point).label] += 1
    return counts


class CensusRow(BaseModel):
    label: AdmLabel
    length: int
    count: int
    predicted: int


class CensusReport(TabularReport):
    params: Params
    strata: List[CensusRow]
    total: int
    expected_total: int

    def title(self) -> str:
        return f"Stratum census over F_{self.params.q}"

    def summary(self) -> List[str]:
        return [f"total: {self.total} (expected {self.expected_total})"]

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["w", "length", "count", "predicted"]
        rows = [
            [row.label.value, str(row.length), str(row.count), str(row.predicted)]
            for row in self.strata
        ]
        return header, rows

    def failed(self) -> bool:
        return self.total != self.expected_total or any(
            row.count != row.predicted for row in self.strata
        )


def census_report(ctx: FieldCtx, limit: Optional[int] = DEFAULT_LIMIT) -> CensusReport:
    counts = stratum_census(ctx, limit)
    rows = [
        CensusRow(
            label=elem.label,
            length=elem.length,
            count=counts[elem.label],
            predicted=predicted_count(elem.label, ctx.q),
        )
        for elem in enumerate_admissible()
    ]
    return CensusReport(
        params=_params(ctx),
        strata=rows,
        total=sum(counts.values()),
        expected_total=special_fiber_size(ctx.q),
    )


# the trace comparison


class Witness(BaseModel):
    point: Codes
    stratum: AdmLabel
    trace: int
    phi: int
    trace_report: TraceReport


class VerificationReport(TabularReport):
    params: Params
    strata: List[StratumResult]
    total: int
    verdict: Verdict
    witness: Optional[Witness] = None
    elapsed_ms: Optional[int] = None

    @model_validator(mode="after")
    def _totals(self) -> "VerificationReport":
        if sum(s.count for s in self.strata) != self.total:
            raise ValueError("per-stratum counts do not add up to the total")
        failures = sum(s.failed for s in self.strata)
        if (self.verdict == "pass") != (failures == 0):
            raise ValueError("verdict disagrees with the failure count")
        return self

    def title(self) -> str:
        return f"Trace versus scaled test function over F_{self.params.q}"

    def summary(self) -> List[str]:
        lines = [f"points: {self.total}", f"verdict: {self.verdict}"]
        if self.witness is not None:
            w = self.witness
            lines.append(
                f"witness: {w.trace_report.point_text} in {w.stratum.value}, "
                f"trace {w.trace} vs Phi {w.phi}"
            )
        if self.elapsed_ms is not None:
            lines.append(f"elapsed: {self.elapsed_ms} ms")
        return lines

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["w", "count", "pass", "fail"]
        rows = [
            [s.label, str(s.count), str(s.passed), str(s.failed)] for s in self.strata
        ]
        return header, rows

    def failed(self) -> bool:
        return self.verdict != "pass"


@dataclass
class _Tally:
    """Partial result of one chunk; merge is associative and commutative."""

    passed: Dict[AdmLabel, int] = field(default_factory=dict)
    failed: Dict[AdmLabel, int] = field(default_factory=dict)
    # (codes, label, trace, phi) of the smallest failing point
    witness: Optional[Tuple[Codes, AdmLabel, int, int]] = None

    def add(self, point: ModelPoint, label: AdmLabel, trace: int, phi: int) -> None:
        if trace == phi:
            self.passed[label] = self.passed.get(label, 0) + 1
            return
        self.failed[label] = self.failed.get(label, 0) + 1
        candidate = (point.codes(), label, trace, phi)
        if self.witness is None or candidate[0] < self.witness[0]:
            self.witness = candidate

    def merge(self, other: "_Tally") -> "_Tally":
        out = _Tally()
        for label in AdmLabel:
            out.passed[label] = self.passed.get(label, 0) + other.passed.get(label, 0)
            out.failed[label] = self.failed.get(label, 0) + other.failed.get(label, 0)
        witnesses = [w for w in (self.witness, other.witness) if w is not None]
        out.witness = min(witnesses, key=lambda w: w[0]) if witnesses else None
        return out


def _verify_chunk(p: int, r: int, x_codes: Sequence[int]) -> _Tally:
    ctx = make_field(p, r)
    tally = _Tally()
    for point in enumerate_special_fiber(ctx, limit=None, x_codes=x_codes):
        elem = classify(point)
        trace = trace_at(point, elem).trace
        tally.add(point, elem.label, trace, phi_scaled(s_x(point, elem), elem, ctx))
    logger.debug("Chunk x in %s: %d failures", list(x_codes), sum(tally.failed.values()))
    return tally


def _chunks(q: int, workers: int) -> List[List[int]]:
    return [c for c in (list(range(k, q, workers)) for k in range(workers)) if c]


def verify_theorem(
    ctx: FieldCtx,
    workers: int = 1,
    limit: Optional[int] = DEFAULT_LIMIT,
    timing: bool = True,
) -> VerificationReport:
    """Compare trace_at with Phi(s_x, w) at every special-fiber point.

    Args:
        ctx: The field
        workers: Processes to split the x coordinate across; 1 runs inline
        limit: Enumeration limit on q^5, None for no limit
        timing: Record elapsed milliseconds in the report

    Raises:
        EnumerationLimitError: If q^5 exceeds the limit
    """
    check_enumeration_limit(ctx, limit)
    start = time.perf_counter()
    logger.info("Verifying over F_%d with %d worker(s)", ctx.q, workers)

    chunks = _chunks(ctx.q, workers)
    if workers == 1:
        tallies = [_verify_chunk(ctx.p, ctx.r, chunks[0])]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_verify_chunk, ctx.p, ctx.r, c) for c in chunks]
            tallies = [future.result() for future in futures]
    tally = reduce(_Tally.merge, tallies, _Tally())

    strata = []
    for elem in enumerate_admissible():
        passed = tally.passed.get(elem.label, 0)
        failed = tally.failed.get(elem.label, 0)
        strata.append(StratumResult.of(elem.label.value, passed + failed, passed, failed))

    witness = None
    if tally.witness is not None:
        codes, label, trace, phi = tally.witness
        witness = Witness(
            point=codes,
            stratum=label,
            trace=trace,
            phi=phi,
            trace_report=trace_at(ModelPoint.from_codes(ctx, codes)),
        )

    elapsed_ms = int((time.perf_counter() - start) * 1000)
    report = VerificationReport(
        params=_params(ctx),
        strata=strata,
        total=sum(s.count for s in strata),
        verdict="fail" if witness else "pass",
        witness=witness,
        elapsed_ms=elapsed_ms if timing else None,
    )
    logger.info(
        "Verification over F_%d: %s (%d points)", ctx.q, report.verdict, report.total
    )
    return report


# identity suite


class IdentityCheck(BaseModel):
    name: str
    checked: int
    violations: int
    witness: Optional[str] = None


class IdentityReport(TabularReport):
    params: Params
    checks: List[IdentityCheck]
    verdict: Verdict

    def title(self) -> str:
        return f"Identity suite over F_{self.params.q}"

    def summary(self) -> List[str]:
        return [f"verdict: {self.verdict}"]

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["check", "checked", "violations", "witness"]
        rows = [
            [c.name, str(c.checked), str(c.violations), c.witness or ""]
            for c in self.checks
        ]
        return header, rows

    def failed(self) -> bool:
        return self.verdict != "pass"


@dataclass
class _Check:
    name: str
    checked: int = 0
    violations: int = 0
    witness: Optional[str] = None

    def record(self, ok: bool, where: str) -> None:
        self.checked += 1
        if not ok:
            self.violations += 1
            if self.witness is None:
                self.witness = where

    def result(self) -> IdentityCheck:
        return IdentityCheck(
            name=self.name,
            checked=self.checked,
            violations=self.violations,
            witness=self.witness,
        )


Classifier = Callable[[ModelPoint], AdmElement]


def check_identities(
    ctx: FieldCtx,
    classifier: Classifier = classify_by_minors,
    samples: int = 100,
    seed: int = 0,
    limit: Optional[int] = DEFAULT_LIMIT,
) -> IdentityReport:
    """Similitude, Oort-Tate zero pattern and containment at every point, plus layer vanishing.

    Args:
        classifier: Stratum map to test the zero patterns against
        samples: Number of random (alpha, delta) pairs for the layer check
    """
    similitude = _Check("similitude")
    pattern = _Check("ot_pattern")
    containment = _Check("containment")
    layers = _Check("layer_vanishing")

    for point in enumerate_special_fiber(ctx, limit):
        where = str(point)
        ot = ot_params(point)
        similitude.record(not any(ot.similitude_defect()), where)
        try:
            label = classifier(point).label
            pattern.record(ot.pattern() == OT_PATTERNS[label], f"{where} as {label.value}")
        except ConsistencyError:
            pattern.record(False, where)
        defects = containment_defects(matrix_chain(point), ctx.zero)
        containment.record(not defects, f"{where}: {'; '.join(defects)}")

    rng = random.Random(seed)
    elems = ctx.elements()
    for _ in range(samples):
        alpha, delta = rng.choice(elems), rng.choice(elems)
        sums = layer_sums(alpha, delta, ctx)
        layers.record(not any(sums), f"({alpha}, {delta}): {sums}")

    checks = [c.result() for c in (similitude, pattern, layers, containment)]
    verdict: Verdict = "pass" if all(c.violations == 0 for c in checks) else "fail"
    logger.info("Identity suite over F_%d: %s", ctx.q, verdict)
    return IdentityReport(params=_params(ctx), checks=checks, verdict=verdict)
