from collections import Counter

import pytest

from krtrace.core.weyl import (
    AdmLabel,
    Alcove,
    admissible,
    dual_vertex,
    enumerate_admissible,
    is_permissible,
    length,
    omega,
)

DIFFERENCE_VECTORS = {
    ("1100", "1100", "1100"),
    ("0101", "0101", "0101"),
    ("1010", "1010", "1010"),
    ("0011", "0011", "0011"),
    ("1100", "1100", "1010"),
    ("0101", "0101", "0011"),
    ("1100", "0101", "0101"),
    ("1010", "0110", "1010"),
    ("1010", "0011", "0011"),
    ("1100", "0110", "1010"),
    ("1100", "0101", "0011"),
    ("1010", "0110", "0011"),
    ("1100", "0110", "0011"),
}


def bits(v):
    return "".join(str(c) for c in v)


def test_thirteen_elements():
    """Test that the alcove search finds the 13 admissible elements"""
    elems = enumerate_admissible()
    assert len(elems) == 13
    assert [e.label for e in elems] == list(AdmLabel)


def test_difference_vectors_match_table():
    """Test the label-free set of difference-vector triples"""
    found = {tuple(bits(t) for t in e.diff) for e in enumerate_admissible()}
    assert found == DIFFERENCE_VECTORS


def test_lengths():
    """Test the length distribution 4, 5, 3, 1"""
    counts = Counter(length(e) for e in enumerate_admissible())
    assert counts == {3: 4, 2: 5, 1: 3, 0: 1}
    assert admissible(AdmLabel.TAU).length == 0
    assert admissible(AdmLabel.S02).length == 2


def test_alcoves_are_permissible():
    """Test every admissible alcove against the alcove axioms"""
    for elem in enumerate_admissible():
        alcove = elem.alcove
        assert alcove.is_alcove()
        assert is_permissible(alcove)
        assert sum(elem.translation) == 2
        assert alcove.duality_constant() == 2


def test_dual_vertex_recovers_x3():
    """Test that duality determines x_3 from x_1"""
    for elem in enumerate_admissible():
        vertices = elem.alcove.vertices
        assert dual_vertex(vertices[1], 2) == vertices[3]


def test_omega():
    """Test the standard vertices"""
    assert omega(0) == (0, 0, 0, 0)
    assert omega(3) == (1, 1, 1, 0)


def test_non_alcove_rejected():
    """Test that a non-monotone tuple is not an alcove"""
    alcove = Alcove(((1, 1, 0, 0), (1, 0, 0, 0), (1, 1, 1, 0), (2, 1, 1, 1)))
    assert not alcove.is_monotone()
    assert not alcove.is_alcove()


@pytest.mark.parametrize(
    "text,label",
    [
        ("s02τ", AdmLabel.S02),
        ("s02tau", AdmLabel.S02),
        ("s_{02}τ", AdmLabel.S02),
        ("s₀₂τ", AdmLabel.S02),
        ("s₁₀₂τ", AdmLabel.S102),
        ("tau", AdmLabel.TAU),
        ("S010TAU", AdmLabel.S010),
        (" s1τ ", AdmLabel.S1),
    ],
)
def test_label_parsing(text, label):
    """Test label spellings"""
    assert AdmLabel.parse(text) == label


def test_unknown_label():
    """Test that unknown labels are rejected"""
    with pytest.raises(ValueError):
        AdmLabel.parse("s3tau")
