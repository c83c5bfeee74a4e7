"""Points of the special fiber of the Iwahori local model and their KR strata.

The local model is U = Spec Z_p[x,y,a,b,c]/(xy - p, ax + by + abc). Its
points carry a chain of rank-2 subspaces F0, F1, F2 of a 4-dimensional space,
each written as a 4x2 matrix with an identity block:

    F0 = [[1, 0], [0, 1], [x, b], [-xc, x]]
    F1 = [[-by, y], [1, 0], [0, 1], [x + bc, -c]]
    F2 = [[y + ac, a], [c(y + ac), y + ac], [1, 0], [0, 1]]

Derivation. Put F0 = [[1,0],[0,1],[x,b],[e,f]] and require phi_0(F0) to lie in
F1, where phi_0 = diag(p,1,1,1) and F1 has its identity block on rows 2-3.
The columns of phi_0(F0) are (p,0,x,e) and (0,1,b,f). Membership in F1 reads
the middle coordinates off as the coefficients, so the first and last rows
of F1 are forced: row 1 of F1 paired with (0,x) must give p, and with (1,b)
must give 0. With row 1 of F1 = (-by, y) this is xy = p and -by + by = 0.
Row 4 of F1 = (x + bc, -c) gives e = -xc and f = x. Repeating with
phi_1 = diag(1,p,1,1) and F2 (identity on rows 3-4) forces F2's first two
rows. The entry of phi_1(F1) in row 1 column 1 is then computed twice, as
-by and as a(x + bc). The two agree exactly when ax + by + abc = 0. The
chain therefore closes on the two relations of U, with x = a0_11, y = a1_22,
a = a2_12, b = a0_12, c = -a1_12.

A point lies in the stratum of the longest admissible w whose difference
vectors pick out invertible 2x2 minors of F0, F1, F2.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import ConsistencyError, EnumerationLimitError, InvalidPointError
from .gf import FieldCtx, FqElement
from .weyl import AdmElement, AdmLabel, enumerate_admissible

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 10**8

COORDINATES = ("x", "y", "a", "b", "c")

# nonzero slots of (b0, b1, a1, a0) on each stratum
OT_PATTERNS: Dict[AdmLabel, Tuple[bool, bool, bool, bool]] = {
    AdmLabel.S010: (False, False, True, True),
    AdmLabel.S102: (True, False, True, False),
    AdmLabel.S201: (False, True, False, True),
    AdmLabel.S212: (True, True, False, False),
    AdmLabel.S01: (False, False, False, True),
    AdmLabel.S12: (True, False, False, False),
    AdmLabel.S10: (False, False, True, False),
    AdmLabel.S21: (False, True, False, False),
    AdmLabel.S02: (False, False, False, False),
    AdmLabel.S0: (False, False, False, False),
    AdmLabel.S1: (False, False, False, False),
    AdmLabel.S2: (False, False, False, False),
    AdmLabel.TAU: (False, False, False, False),
}


@dataclass(frozen=True)
class ModelPoint:
    """A point (x, y, a, b, c) of F_q^5."""

    x: FqElement
    y: FqElement
    a: FqElement
    b: FqElement
    c: FqElement

    @classmethod
    def from_codes(cls, ctx: FieldCtx, codes: Sequence[int]) -> "ModelPoint":
        if len(codes) != len(COORDINATES):
            raise InvalidPointError(
                f"A point needs {len(COORDINATES)} coordinates, got {len(codes)}"
            )
        return cls(*(ctx.from_code(code) for code in codes))

    @property
    def ctx(self) -> FieldCtx:
        return self.x.ctx

    def coords(self) -> Dict[str, FqElement]:
        return {"x": self.x, "y": self.y, "a": self.a, "b": self.b, "c": self.c}

    def codes(self) -> Tuple[int, ...]:
        return tuple(v.code for v in self.coords().values())

    def is_special(self) -> bool:
        x, y, a, b, c = self.x, self.y, self.a, self.b, self.c
        return not (x * y) and not (a * x + b * y + a * b * c)

    def require_special(self) -> None:
        if not self.is_special():
            raise InvalidPointError(
                f"Point {self} is not on the special fiber (need xy = 0 and ax+by+abc = 0)"
            )

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.coords().values()) + ")"


@dataclass(frozen=True)
class OTQuadruple:
    """Oort-Tate parameters (b0, b1, a1, a0) = (x, x+bc, y+ac, y)."""

    b0: FqElement
    b1: FqElement
    a1: FqElement
    a0: FqElement

    def as_tuple(self) -> Tuple[FqElement, FqElement, FqElement, FqElement]:
        return (self.b0, self.b1, self.a1, self.a0)

    def pattern(self) -> Tuple[bool, bool, bool, bool]:
        b0, b1, a1, a0 = self.as_tuple()
        return (bool(b0), bool(b1), bool(a1), bool(a0))

    def similitude_defect(self) -> Tuple[FqElement, FqElement]:
        return (self.b0 * self.a0, self.b1 * self.a1)


def ot_params(point: ModelPoint) -> OTQuadruple:
    x, y, a, b, c = point.x, point.y, point.a, point.b, point.c
    return OTQuadruple(b0=x, b1=x + b * c, a1=y + a * c, a0=y)


Row = Tuple[FqElement, FqElement]
Matrix = Tuple[Row, Row, Row, Row]


def minor(matrix: Matrix, rows: Tuple[int, int]) -> FqElement:
    (m00, m01), (m10, m11) = matrix[rows[0]], matrix[rows[1]]
    return m00 * m11 - m01 * m10


@dataclass(frozen=True)
class MatrixChain:
    F0: Matrix
    F1: Matrix
    F2: Matrix

    # F_i carries the identity on rows (i, i+1), counted from 0
    def matrices(self) -> Tuple[Matrix, Matrix, Matrix]:
        return (self.F0, self.F1, self.F2)


def matrix_chain(point: ModelPoint) -> MatrixChain:
    x, y, a, b, c = point.x, point.y, point.a, point.b, point.c
    zero, one = point.ctx.zero, point.ctx.one
    u = y + a * c
    return MatrixChain(
        F0=((one, zero), (zero, one), (x, b), (-(x * c), x)),
        F1=((-(b * y), y), (one, zero), (zero, one), (x + b * c, -c)),
        F2=((u, a), (c * u, u), (one, zero), (zero, one)),
    )


def _in_span(matrix: Matrix, block: int, vector: Sequence[FqElement]) -> bool:
    """Is vector a combination of the columns of matrix (identity on rows block, block+1)?"""
    s, t = vector[block], vector[block + 1]
    return all(row[0] * s + row[1] * t == v for row, v in zip(matrix, vector))


def containment_defects(chain: MatrixChain, p_value: FqElement) -> List[str]:
    """Which of phi_0(F0) in F1, phi_1(F1) in F2 fail; phi_i scales row i by p."""
    defects = []
    mats = chain.matrices()
    for i in (0, 1):
        for col in (0, 1):
            vector = [row[col] for row in mats[i]]
            vector[i] = vector[i] * p_value
            if not _in_span(mats[i + 1], i + 1, vector):
                defects.append(f"phi_{i}(F{i}) column {col + 1} not in F{i + 1}")
    return defects


def _rows(diff: Tuple[int, ...]) -> Tuple[int, int]:
    picked = tuple(j for j, bit in enumerate(diff) if bit)
    return (picked[0], picked[1])


def stratum_candidates(
    point: ModelPoint, elements: Optional[Sequence[AdmElement]] = None
) -> List[AdmElement]:
    """W(P): admissible w whose selected minors of F0, F1, F2 are all invertible."""
    mats = matrix_chain(point).matrices()
    cache: Dict[Tuple[int, Tuple[int, int]], bool] = {}

    def invertible(i: int, rows: Tuple[int, int]) -> bool:
        key = (i, rows)
        if key not in cache:
            cache[key] = bool(minor(mats[i], rows))
        return cache[key]

    return [
        elem
        for elem in (elements or enumerate_admissible())
        if all(invertible(i, _rows(elem.diff[i])) for i in range(3))
    ]


def classify_by_minors(
    point: ModelPoint, elements: Optional[Sequence[AdmElement]] = None
) -> AdmElement:
    """The unique longest element of W(P)."""
    candidates = stratum_candidates(point, elements)
    if not candidates:
        raise ConsistencyError(f"No admissible element qualifies at {point}")
    top = max(elem.length for elem in candidates)
    longest = [elem for elem in candidates if elem.length == top]
    if len(longest) != 1:
        labels = ", ".join(str(elem) for elem in longest)
        raise ConsistencyError(f"Maximal stratum not unique at {point}: {labels}")
    return longest[0]


def classify(point: ModelPoint) -> AdmElement:
    """KR stratum of a special-fiber point.

    Raises:
        InvalidPointError: If the point is off the special fiber
        ConsistencyError: If the maximal element is not unique or the Oort-Tate
            zero pattern disagrees with the stratum
    """
    point.require_special()
    elem = classify_by_minors(point)
    pattern = ot_params(point).pattern()
    if pattern != OT_PATTERNS[elem.label]:
        raise ConsistencyError(
            f"Oort-Tate pattern {pattern} at {point} does not match stratum {elem}"
        )
    return elem


def special_fiber_size(q: int) -> int:
    return q * q * (3 * q - 2) + (q - 1) ** 3


def check_enumeration_limit(ctx: FieldCtx, limit: Optional[int]) -> None:
    space = ctx.q**5
    if limit is not None and space > limit:
        raise EnumerationLimitError(
            f"q^5 = {space} tuples exceeds the enumeration limit {limit}"
        )


def enumerate_special_fiber(
    ctx: FieldCtx,
    limit: Optional[int] = DEFAULT_LIMIT,
    x_codes: Optional[Iterable[int]] = None,
) -> Iterator[ModelPoint]:
    """Yield the special-fiber points of F_q^5 in lexicographic code order.

    Args:
        ctx: The field
        limit: Refuse when q^5 exceeds this many tuples; None disables the check
        x_codes: Restrict the first coordinate to these codes (for chunking)

    Raises:
        EnumerationLimitError: If q^5 exceeds the limit
    """
    check_enumeration_limit(ctx, limit)
    elems = ctx.elements()
    xs = elems if x_codes is None else [elems[code] for code in x_codes]
    for x in xs:
        for y in elems:
            if x * y:
                continue
            for a in elems:
                for b in elems:
                    linear = a * x + b * y
                    ab = a * b
                    if ab:
                        # ax + by + abc = 0 fixes c
                        yield ModelPoint(x, y, a, b, -linear / ab)
                    elif not linear:
                        for c in elems:
                            yield ModelPoint(x, y, a, b, c)
