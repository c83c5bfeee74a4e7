"""The mu-admissible set of GSp4 for mu = (1,1,0,0), via permissible alcoves."""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple

from .errors import ConsistencyError

logger = logging.getLogger(__name__)

N = 2
RANK = 2 * N
DUALITY_CONSTANTS = (0, 1, 2)

Vec = Tuple[int, ...]

_SUBSCRIPTS = str.maketrans("₀₁₂", "012")


class AdmLabel(str, Enum):
    S010 = "s010τ"
    S102 = "s102τ"
    S201 = "s201τ"
    S212 = "s212τ"
    S01 = "s01τ"
    S12 = "s12τ"
    S10 = "s10τ"
    S02 = "s02τ"
    S21 = "s21τ"
    S0 = "s0τ"
    S1 = "s1τ"
    S2 = "s2τ"
    TAU = "τ"

    @classmethod
    def parse(cls, text: str) -> "AdmLabel":
        """Accept the table label, its subscript form ("s₀₂τ") or ASCII ("s02tau")."""
        key = text.strip().lower().translate(_SUBSCRIPTS)
        for junk in ("·", "_", "{", "}", " "):
            key = key.replace(junk, "")
        if key.endswith("tau"):
            key = key[: -len("tau")] + "τ"
        for label in cls:
            if label.value == key:
                return label
        raise ValueError(f"Unknown admissible element: {text!r}")


# length, decomposition t_lambda * (finite Weyl word), difference vectors t_0, t_1, t_2
_TABLE: Dict[AdmLabel, Tuple[int, str, Tuple[str, str, str]]] = {
    AdmLabel.S010: (3, "t(1100)", ("1100", "1100", "1100")),
    AdmLabel.S102: (3, "t(0101)", ("0101", "0101", "0101")),
    AdmLabel.S201: (3, "t(1010)", ("1010", "1010", "1010")),
    AdmLabel.S212: (3, "t(0011)", ("0011", "0011", "0011")),
    AdmLabel.S01: (2, "t(1100)s2", ("1100", "1100", "1010")),
    AdmLabel.S12: (2, "t(0101)s2", ("0101", "0101", "0011")),
    AdmLabel.S10: (2, "t(1100)s121", ("1100", "0101", "0101")),
    AdmLabel.S02: (2, "t(1010)s1", ("1010", "0110", "1010")),
    AdmLabel.S21: (2, "t(1010)s121", ("1010", "0011", "0011")),
    AdmLabel.S0: (1, "t(1100)s21", ("1100", "0110", "1010")),
    AdmLabel.S1: (1, "t(1100)s1212", ("1100", "0101", "0011")),
    AdmLabel.S2: (1, "t(1010)s12", ("1010", "0110", "0011")),
    AdmLabel.TAU: (0, "t(1100)s212", ("1100", "0110", "0011")),
}


def _vec(bits: str) -> Vec:
    return tuple(int(b) for b in bits)


def omega(i: int) -> Vec:
    """omega_i = (1^i, 0^(4-i))."""
    return tuple(1 if j < i else 0 for j in range(RANK))


def theta(v: Vec) -> Vec:
    return tuple(-c for c in reversed(v))


def _shift(v: Vec, d: int) -> Vec:
    return tuple(c + d for c in v)


def _leq(u: Vec, v: Vec) -> bool:
    return all(a <= b for a, b in zip(u, v))


@dataclass(frozen=True)
class Alcove:
    """Vertices x_0..x_3 of an alcove for GSp4; x_4 is x_0 + (1,1,1,1)."""

    vertices: Tuple[Vec, Vec, Vec, Vec]

    def vertex(self, i: int) -> Vec:
        if i == RANK:
            return _shift(self.vertices[0], 1)
        return self.vertices[i]

    @property
    def difference_vectors(self) -> Tuple[Vec, ...]:
        return tuple(
            tuple(a - b for a, b in zip(self.vertices[i], omega(i))) for i in range(RANK)
        )

    def is_monotone(self) -> bool:
        return all(_leq(self.vertex(i), self.vertex(i + 1)) for i in range(RANK))

    def has_size_steps(self) -> bool:
        return all(
            sum(self.vertex(i + 1)) == sum(self.vertex(i)) + 1 for i in range(RANK)
        )

    def duality_constant(self) -> Optional[int]:
        """The d with x_(4-i) = d + theta(x_i) for every i, if one exists."""
        for d in DUALITY_CONSTANTS:
            if all(
                self.vertex(RANK - i) == _shift(theta(self.vertex(i)), d)
                for i in range(RANK)
            ):
                return d
        return None

    def is_alcove(self) -> bool:
        return (
            self.is_monotone()
            and self.has_size_steps()
            and self.duality_constant() is not None
        )


def dual_vertex(x1: Vec, d: int) -> Vec:
    """Recover x_3 from x_1 by duality."""
    return _shift(theta(x1), d)


def is_permissible(alcove: Alcove) -> bool:
    """Sum of x_0 is n = 2 and omega_i <= x_i <= omega_i + 1 for every i."""
    if sum(alcove.vertices[0]) != N:
        return False
    for i, x in enumerate(alcove.vertices):
        low = omega(i)
        if not (_leq(low, x) and _leq(x, _shift(low, 1))):
            return False
    return True


@dataclass(frozen=True)
class AdmElement:
    """One of the 13 admissible elements with its alcove data."""

    label: AdmLabel
    length: int
    decomposition: str
    diff: Tuple[Vec, Vec, Vec]
    translation: Vec
    alcove: Alcove

    def __str__(self) -> str:
        return self.label.value


def _candidates() -> List[Alcove]:
    found = []
    for bits in product((0, 1), repeat=RANK * RANK):
        diffs = [bits[RANK * i : RANK * (i + 1)] for i in range(RANK)]
        vertices = tuple(
            tuple(o + t for o, t in zip(omega(i), diffs[i])) for i in range(RANK)
        )
        alcove = Alcove(vertices)  # type: ignore[arg-type]
        if is_permissible(alcove) and alcove.is_alcove():
            found.append(alcove)
    return found


@lru_cache(maxsize=None)
def enumerate_admissible() -> Tuple[AdmElement, ...]:
    """Search every alcove with x_i in omega_i + {0,1}^4 and match it to the table.

    Raises:
        ConsistencyError: If the search does not give exactly the 13 tabulated elements
    """
    by_diff = {
        tuple(_vec(v) for v in diffs): label for label, (_, _, diffs) in _TABLE.items()
    }
    elements: Dict[AdmLabel, AdmElement] = {}
    for alcove in _candidates():
        diff = alcove.difference_vectors[:3]
        label = by_diff.get(diff)
        if label is None:
            raise ConsistencyError(f"Permissible alcove {alcove.vertices} is not tabulated")
        length, decomposition, _ = _TABLE[label]
        elements[label] = AdmElement(
            label=label,
            length=length,
            decomposition=decomposition,
            diff=diff,  # type: ignore[arg-type]
            translation=alcove.vertices[0],
            alcove=alcove,
        )
    if len(elements) != len(_TABLE):
        raise ConsistencyError(f"Expected 13 admissible elements, found {len(elements)}")
    logger.debug("Enumerated %d admissible elements", len(elements))
    return tuple(elements[label] for label in AdmLabel)


def admissible(label: AdmLabel) -> AdmElement:
    for elem in enumerate_admissible():
        if elem.label == label:
            return elem
    raise KeyError(label)


def length(elem: AdmElement) -> int:
    return elem.length
