import pytest
from pydantic import ValidationError

from krtrace.core.gf import make_field
from krtrace.core.localmodel import ModelPoint, classify, enumerate_special_fiber, ot_params
from krtrace.core.nearby import (
    FiberSegmentReport,
    TraceReport,
    layer_sums,
    local_trace,
    projective_line,
    s1_sweep_sum,
    tower_sum,
    tower_trace_E0,
    trace_at,
    trace_bound,
)
from krtrace.core.report import Params
from krtrace.core.weyl import AdmLabel

FIELDS = [(3, 1), (5, 1), (3, 2)]
WORST_POINT_FIELDS = FIELDS + [(5, 2)]


@pytest.fixture
def f3():
    """F_3"""
    return make_field(3, 1)


def expected_trace(point, label):
    """Per-stratum closed forms, independent of the fiber recipes"""
    ctx = point.ctx
    p, q = ctx.p, ctx.q
    length = classify(point).length
    if label == AdmLabel.S02:
        units = [point.a / point.b]
    else:
        units = [v for v in ot_params(point).as_tuple() if v]
    rational = all(ctx.norm(v) == 1 for v in units)
    if length == 3:
        return (p - 1) ** 2 if rational else 0
    if length == 2:
        return (p - 1) * (1 - q) if rational else 0
    if length == 1:
        return (1 - q) ** 2
    return (1 - q) ** 3 + (p - 1) * q * (1 - q)


def test_local_trace():
    """Test (1-q)^(k-1)"""
    assert local_trace(1, 9) == 1
    assert local_trace(2, 3) == -2
    assert local_trace(3, 3) == 4
    assert local_trace(4, 3) == -8
    with pytest.raises(ValueError):
        local_trace(0, 3)


@pytest.mark.parametrize(
    "codes,trace",
    [
        ((0, 0, 0, 0, 0), -20),
        ((0, 0, 1, 1, 0), -4),
        ((0, 0, 1, 2, 0), 0),
        ((0, 0, 0, 0, 1), 4),
        ((0, 1, 0, 0, 0), 4),
        ((0, 2, 0, 0, 0), 0),
    ],
)
def test_trace_examples_f3(f3, codes, trace):
    """Test hand-computed traces over F_3"""
    assert trace_at(ModelPoint.from_codes(f3, codes)).trace == trace


@pytest.mark.parametrize("p,r", WORST_POINT_FIELDS)
def test_worst_point(p, r):
    """Test the trace at the origin against its closed form"""
    fq = make_field(p, r)
    q = fq.q
    report = trace_at(ModelPoint.from_codes(fq, (0, 0, 0, 0, 0)))
    assert report.stratum == AdmLabel.TAU
    assert report.trace == (1 - q) ** 3 + (p - 1) * q * (1 - q)


def test_worst_point_f9_value():
    """Test the origin over F_9"""
    report = trace_at(ModelPoint.from_codes(make_field(3, 2), (0, 0, 0, 0, 0)))
    assert report.trace == -656


@pytest.mark.parametrize("p,r", FIELDS)
def test_traces_match_closed_forms(p, r):
    """Test every point against the per-stratum closed forms"""
    fq = make_field(p, r)
    for point in enumerate_special_fiber(fq):
        elem = classify(point)
        report = trace_at(point, elem)
        assert report.trace == expected_trace(point, elem.label), str(point)
        assert abs(report.trace) <= trace_bound(fq)


@pytest.mark.slow
def test_traces_match_closed_forms_f25():
    """Test the closed forms over F_25"""
    fq = make_field(5, 2)
    for point in enumerate_special_fiber(fq):
        elem = classify(point)
        assert trace_at(point, elem).trace == expected_trace(point, elem.label)


def test_tower_examples(f3):
    """Test the tower over single points of P^1 x P^1"""
    zero, one, two = (f3.from_int(k) for k in range(3))
    assert tower_trace_E0(zero, zero, f3) == -8
    assert tower_trace_E0(one, zero, f3) == 4
    assert tower_trace_E0(one, two, f3) == -2


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)])
def test_layers_vanish(p, r):
    """Test that every intermediate layer sums to zero"""
    fq = make_field(p, r)
    assert len(layer_sums(fq.one, fq.one, fq)) == p - 2
    for alpha in fq.elements():
        for delta in fq.elements():
            assert layer_sums(alpha, delta, fq) == [0] * (p - 2)


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)])
def test_tower_sum(p, r):
    """Test the P^1 x P^1 total (1-q)^3"""
    fq = make_field(p, r)
    assert len(projective_line(fq)) == fq.q + 1
    assert tower_sum(fq) == (1 - fq.q) ** 3


@pytest.mark.parametrize("p,r", FIELDS)
def test_s1_sweep(p, r):
    """Test the (1:lam) sweep over c = gamma sums to (p-1)(q-1)"""
    fq = make_field(p, r)
    for gamma in fq.units():
        assert s1_sweep_sum(gamma, fq) == (p - 1) * (fq.q - 1)


def test_fiber_detail_adds_up(f3):
    """Test the per-segment breakdown at the origin"""
    report = trace_at(ModelPoint.from_codes(f3, (0, 0, 0, 0, 0)))
    assert sum(seg.contribution for seg in report.fiber_detail) == report.trace
    assert any("tower" in seg.description for seg in report.fiber_detail)
    assert "trace: -20" in report.summary()


def test_report_rejects_bad_sum():
    """Test the TraceReport sum validator"""
    with pytest.raises(ValidationError):
        TraceReport(
            params=Params(p=3, r=1, q=3),
            point=(0, 0, 0, 0, 1),
            point_text="(0,0,0,0,1)",
            stratum=AdmLabel.S1,
            length=1,
            trace=5,
            fiber_detail=[
                FiberSegmentReport(description="(0:1)", count=1, branches=3, contribution=4)
            ],
        )


def test_report_rejects_bad_contribution():
    """Test the per-segment contribution validator"""
    with pytest.raises(ValidationError):
        TraceReport(
            params=Params(p=3, r=1, q=3),
            point=(0, 0, 0, 0, 1),
            point_text="(0,0,0,0,1)",
            stratum=AdmLabel.S1,
            length=1,
            trace=3,
            fiber_detail=[
                FiberSegmentReport(description="(0:1)", count=1, branches=3, contribution=3)
            ],
        )
