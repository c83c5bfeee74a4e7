from collections import Counter
from itertools import product

import pytest

from krtrace.core.errors import EnumerationLimitError, InvalidPointError
from krtrace.core.gf import make_field
from krtrace.core.localmodel import (
    OT_PATTERNS,
    ModelPoint,
    classify,
    classify_by_minors,
    containment_defects,
    enumerate_special_fiber,
    matrix_chain,
    ot_params,
    special_fiber_size,
    stratum_candidates,
)
from krtrace.core.weyl import AdmLabel

# one hand-checked point of every stratum over F_3
STRATUM_POINTS = {
    AdmLabel.TAU: (0, 0, 0, 0, 0),
    AdmLabel.S0: (0, 0, 1, 0, 0),
    AdmLabel.S1: (0, 0, 0, 0, 1),
    AdmLabel.S2: (0, 0, 0, 1, 0),
    AdmLabel.S02: (0, 0, 1, 1, 0),
    AdmLabel.S01: (0, 1, 1, 0, 2),
    AdmLabel.S12: (1, 0, 0, 1, 2),
    AdmLabel.S10: (0, 0, 1, 0, 1),
    AdmLabel.S21: (0, 0, 0, 1, 1),
    AdmLabel.S010: (0, 1, 0, 0, 0),
    AdmLabel.S212: (1, 0, 0, 0, 0),
    AdmLabel.S102: (1, 0, 1, 1, 2),
    AdmLabel.S201: (0, 2, 1, 1, 1),
}


@pytest.fixture
def f3():
    """F_3"""
    return make_field(3, 1)


def test_special_fiber_size():
    """Test the closed form q^2(3q-2) + (q-1)^3"""
    assert special_fiber_size(3) == 71
    assert special_fiber_size(5) == 389
    assert special_fiber_size(9) == 2537
    assert special_fiber_size(25) == 59449


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (3, 2)])
def test_enumeration_matches_closed_form(p, r):
    """Test that the enumerator yields every special point exactly once"""
    fq = make_field(p, r)
    points = list(enumerate_special_fiber(fq))
    assert len(points) == special_fiber_size(fq.q)
    assert len({pt.codes() for pt in points}) == len(points)
    assert all(pt.is_special() for pt in points)


def test_enumeration_is_lexicographic(f3):
    """Test code order and the worst point first"""
    codes = [pt.codes() for pt in enumerate_special_fiber(f3)]
    assert codes == sorted(codes)
    assert codes[0] == (0, 0, 0, 0, 0)


def test_enumeration_matches_brute_force(f3):
    """Test against a filter over all of F_3^5"""
    brute = {
        codes
        for codes in product(range(3), repeat=5)
        if ModelPoint.from_codes(f3, codes).is_special()
    }
    assert {pt.codes() for pt in enumerate_special_fiber(f3)} == brute


def test_x_chunks_partition(f3):
    """Test that restricting x splits the enumeration"""
    whole = [pt.codes() for pt in enumerate_special_fiber(f3)]
    parts = [
        pt.codes()
        for chunk in ([0], [1, 2])
        for pt in enumerate_special_fiber(f3, x_codes=chunk)
    ]
    assert parts == whole


def test_enumeration_limit(f3):
    """Test that oversize enumerations are refused"""
    with pytest.raises(EnumerationLimitError, match="exceeds the enumeration limit"):
        next(enumerate_special_fiber(f3, limit=100))
    assert len(list(enumerate_special_fiber(f3, limit=None))) == 71


@pytest.mark.parametrize("label,codes", list(STRATUM_POINTS.items()))
def test_classify_examples(f3, label, codes):
    """Test classification of one point per stratum"""
    point = ModelPoint.from_codes(f3, codes)
    assert point.is_special()
    assert classify(point).label == label
    assert ot_params(point).pattern() == OT_PATTERNS[label]


def test_worst_point_has_one_candidate(f3):
    """Test that only tau qualifies at the origin"""
    origin = ModelPoint.from_codes(f3, (0, 0, 0, 0, 0))
    assert [elem.label for elem in stratum_candidates(origin)] == [AdmLabel.TAU]


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (3, 2)])
def test_ot_pattern_matches_stratum(p, r):
    """Test that the Oort-Tate zero pattern is constant on strata"""
    for point in enumerate_special_fiber(make_field(p, r)):
        elem = classify_by_minors(point)
        assert ot_params(point).pattern() == OT_PATTERNS[elem.label]


def test_census_over_f3(f3):
    """Test stratum sizes over F_3"""
    census = Counter(classify(pt).label for pt in enumerate_special_fiber(f3))
    assert census[AdmLabel.TAU] == 1
    for label in (AdmLabel.S0, AdmLabel.S1, AdmLabel.S2):
        assert census[label] == 2
    for label in (AdmLabel.S01, AdmLabel.S12, AdmLabel.S10, AdmLabel.S21, AdmLabel.S02):
        assert census[label] == 4
    assert census[AdmLabel.S010] == census[AdmLabel.S212] == 14
    assert census[AdmLabel.S201] == census[AdmLabel.S102] == 8
    assert sum(census.values()) == 71


def test_similitude_identity(f3):
    """Test b0 a0 = b1 a1 = 0 on the special fiber"""
    for point in enumerate_special_fiber(f3):
        assert all(v == 0 for v in ot_params(point).similitude_defect())


def test_chain_closes_at_zero(f3):
    """Test the lattice-chain containments on the special fiber"""
    for point in enumerate_special_fiber(f3):
        assert containment_defects(matrix_chain(point), f3.zero) == []


def test_chain_closes_generically(f3):
    """Test the containments with p = xy off the special fiber"""
    for codes in product(range(3), repeat=5):
        point = ModelPoint.from_codes(f3, codes)
        x, y, a, b, c = point.x, point.y, point.a, point.b, point.c
        if a * x + b * y + a * b * c:
            continue
        assert containment_defects(matrix_chain(point), x * y) == []


def test_chain_detects_wrong_p(f3):
    """Test that a wrong uniformizer value breaks the containment"""
    origin = ModelPoint.from_codes(f3, (0, 0, 0, 0, 0))
    assert containment_defects(matrix_chain(origin), f3.one) != []


def test_classify_rejects_generic_point(f3):
    """Test that points off the special fiber are refused"""
    with pytest.raises(InvalidPointError, match="not on the special fiber"):
        classify(ModelPoint.from_codes(f3, (1, 1, 0, 0, 0)))


def test_point_arity(f3):
    """Test that a point needs five coordinates"""
    with pytest.raises(InvalidPointError):
        ModelPoint.from_codes(f3, (0, 0, 0))
