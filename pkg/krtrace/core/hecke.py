"""Torus combinatorics for the scaled test function.

The similitude torus acts on the Oort-Tate generators through
diag(h0, h1, k1, k0); a torus element is stored as (g0, g1, g2, g3) in that
order. For each admissible w the subgroup A_w of T(F_p) decides where the
test function is nonzero, and Phi(s, w) = (q-1)^3 * phi'(s w) is compared with
the nearby-cycles trace at points whose torus element s_x is s.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import ConsistencyError, InvalidPointError
from .gf import FieldCtx, FqElement
from .localmodel import OT_PATTERNS, ModelPoint, ot_params
from .report import Params, TabularReport
from .weyl import AdmElement, AdmLabel

logger = logging.getLogger(__name__)

Quad = Tuple[FqElement, FqElement, FqElement, FqElement]


@dataclass(frozen=True)
class TorusElement:
    """diag(g0, g1, g2, g3) with nonzero entries; the similitude relation is only a flag."""

    g0: FqElement
    g1: FqElement
    g2: FqElement
    g3: FqElement

    def __post_init__(self) -> None:
        if not all(self.as_tuple()):
            raise InvalidPointError(f"Torus entries must be nonzero, got {self}")

    @classmethod
    def from_codes(cls, ctx: FieldCtx, codes: Sequence[int]) -> "TorusElement":
        if len(codes) != 4:
            raise InvalidPointError(f"A torus element needs 4 entries, got {len(codes)}")
        return cls(*(ctx.from_code(code) for code in codes))

    def as_tuple(self) -> Quad:
        return (self.g0, self.g1, self.g2, self.g3)

    def codes(self) -> Tuple[int, int, int, int]:
        return (self.g0.code, self.g1.code, self.g2.code, self.g3.code)

    def is_similitude(self) -> bool:
        return self.g0 * self.g3 == self.g1 * self.g2

    def norm(self) -> "TorusElement":
        """Componentwise N_r, landing in T(F_p)."""
        return TorusElement(*(g.ctx.norm(g) for g in self.as_tuple()))

    def __str__(self) -> str:
        return "diag(" + ",".join(str(g) for g in self.as_tuple()) + ")"


Predicate = Callable[[FqElement, FqElement, FqElement, FqElement], bool]


@dataclass(frozen=True)
class SubgroupSpec:
    label: AdmLabel
    description: str
    predicate: Predicate


def _always(g0: FqElement, g1: FqElement, g2: FqElement, g3: FqElement) -> bool:
    return True


_SPECS: Tuple[Tuple[AdmLabel, str, Predicate], ...] = (
    (
        AdmLabel.S010,
        "g2 = g3 = 1, g0 = g1",
        lambda g0, g1, g2, g3: g2 == 1 and g3 == 1 and g0 == g1,
    ),
    (
        AdmLabel.S102,
        "g0 = g2 = 1, g1 = g3",
        lambda g0, g1, g2, g3: g0 == 1 and g2 == 1 and g1 == g3,
    ),
    (
        AdmLabel.S201,
        "g1 = g3 = 1, g0 = g2",
        lambda g0, g1, g2, g3: g1 == 1 and g3 == 1 and g0 == g2,
    ),
    (
        AdmLabel.S212,
        "g0 = g1 = 1, g2 = g3",
        lambda g0, g1, g2, g3: g0 == 1 and g1 == 1 and g2 == g3,
    ),
    (
        AdmLabel.S01,
        "g3 = 1, g0 = g1 g2",
        lambda g0, g1, g2, g3: g3 == 1 and g0 == g1 * g2,
    ),
    (
        AdmLabel.S12,
        "g0 = 1, g3 = g1 g2",
        lambda g0, g1, g2, g3: g0 == 1 and g3 == g1 * g2,
    ),
    (
        AdmLabel.S10,
        "g2 = 1, g1 = g0 g3",
        lambda g0, g1, g2, g3: g2 == 1 and g1 == g0 * g3,
    ),
    (
        AdmLabel.S21,
        "g1 = 1, g2 = g0 g3",
        lambda g0, g1, g2, g3: g1 == 1 and g2 == g0 * g3,
    ),
    # for s_x = (a, b, a, b) this is N(a/b) = 1
    (AdmLabel.S02, "g0 = g1", lambda g0, g1, g2, g3: g0 == g1),
    (AdmLabel.S0, "all of T", _always),
    (AdmLabel.S1, "all of T", _always),
    (AdmLabel.S2, "all of T", _always),
    (
        AdmLabel.TAU,
        "g0 = g1, g2 = g3",
        lambda g0, g1, g2, g3: g0 == g1 and g2 == g3,
    ),
)

SUBGROUPS: Dict[AdmLabel, SubgroupSpec] = {
    label: SubgroupSpec(label, description, predicate)
    for label, description, predicate in _SPECS
}


def _prime_quad(g: Sequence[FqElement]) -> Quad:
    if len(g) != 4 or not all(x.in_prime_field and x for x in g):
        raise InvalidPointError("Expected four nonzero prime-field entries")
    return (g[0], g[1], g[2], g[3])


def in_A(w: AdmElement, g: Sequence[FqElement]) -> bool:
    """Membership of g in A_w, for g with nonzero prime-field entries."""
    return SUBGROUPS[w.label].predicate(*_prime_quad(g))


def in_T_w(w: AdmElement, g: Sequence[FqElement]) -> bool:
    """Similitude elements equal to 1 wherever the Oort-Tate pattern of w is nonzero."""
    g0, g1, g2, g3 = _prime_quad(g)
    if g0 * g3 != g1 * g2:
        return False
    pattern = OT_PATTERNS[w.label]
    return all(x == 1 for x, nonzero in zip((g0, g1, g2, g3), pattern) if nonzero)


def s_x(point: ModelPoint, w: AdmElement) -> TorusElement:
    """The torus element attached to a point of stratum w.

    Zero Oort-Tate parameters are replaced by 1; on the s02 stratum it is
    (a, b, a, b), both nonzero there.
    """
    if w.label == AdmLabel.S02:
        return TorusElement(point.a, point.b, point.a, point.b)
    one = point.ctx.one
    return TorusElement(*(v if v else one for v in ot_params(point).as_tuple()))


def t_x(point: ModelPoint) -> Tuple[Optional[FqElement], ...]:
    """Norms of the nonzero Oort-Tate parameters; None marks a zero slot."""
    ctx = point.ctx
    return tuple(ctx.norm(v) if v else None for v in ot_params(point).as_tuple())


def phi_prime(s: TorusElement, w: AdmElement, ctx: FieldCtx) -> Fraction:
    """phi'(s w) as an exact rational.

    Nonzero values by length of w, with u = 1 - q:
    3: -(p-1)^2 u^-3, 2: -(p-1) u^-2 (both only on A_w), 1: -u^-1,
    0: -(1 + (p-1) q u^-2) on A_tau and -1 off it.
    """
    p, q = ctx.p, ctx.q
    u = Fraction(1 - q)
    member = in_A(w, s.norm().as_tuple())
    if w.length == 3:
        return -((p - 1) ** 2) / u**3 if member else Fraction(0)
    if w.length == 2:
        return -(p - 1) / u**2 if member else Fraction(0)
    if w.length == 1:
        return -1 / u
    return -(1 + (p - 1) * q / u**2) if member else Fraction(-1)


def phi_scaled(s: TorusElement, w: AdmElement, ctx: FieldCtx) -> int:
    """Phi(s, w) = (q-1)^3 phi'(s w).

    Since (q-1)^3 = -(1-q)^3 the scaled values are (p-1)^2, (p-1)(1-q),
    (1-q)^2 and (1-q)^3 + (p-1)q(1-q) (or (1-q)^3 off A_tau). Elements outside
    the admissible set have no AdmElement, so phi' vanishing there needs no
    branch.

    Raises:
        ConsistencyError: If the scaled value is not an integer
    """
    value = phi_prime(s, w, ctx) * (ctx.q - 1) ** 3
    if value.denominator != 1:
        raise ConsistencyError(f"(q-1)^3 phi'({s} {w}) = {value} is not an integer")
    return int(value)


@dataclass(frozen=True)
class SubgroupComparison:
    label: AdmLabel
    size_A: int
    size_T_w: int
    equal: bool


def _similitude_torus(ctx: FieldCtx) -> List[Quad]:
    units = [ctx.from_int(k) for k in range(1, ctx.p)]
    return [g for g in product(units, repeat=4) if g[0] * g[3] == g[1] * g[2]]


def compare_subgroups(
    ctx: FieldCtx, elements: Sequence[AdmElement]
) -> List[SubgroupComparison]:
    """Compare A_w and T_w inside the similitude torus T(F_p)."""
    torus = _similitude_torus(ctx)
    out = []
    for w in elements:
        in_a = {g for g in torus if in_A(w, g)}
        in_t = {g for g in torus if in_T_w(w, g)}
        out.append(SubgroupComparison(w.label, len(in_a), len(in_t), in_a == in_t))
    return out


class PhiReport(TabularReport):
    params: Params
    s: Tuple[int, int, int, int]
    s_text: str
    norm: Tuple[int, int, int, int]
    similitude: bool
    stratum: AdmLabel
    length: int
    member: bool
    phi_prime: str
    phi: int

    def title(self) -> str:
        return f"Scaled test function over F_{self.params.q}"

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["s", "N(s)", "w", "in A_w", "phi'", "Phi"]
        row = [
            self.s_text,
            ",".join(str(g) for g in self.norm),
            self.stratum.value,
            "yes" if self.member else "no",
            self.phi_prime,
            str(self.phi),
        ]
        return header, [row]

    def summary(self) -> List[str]:
        if self.similitude:
            return []
        return ["note: s does not satisfy g0 g3 = g1 g2"]


def phi_report(s: TorusElement, w: AdmElement, ctx: FieldCtx) -> PhiReport:
    norm = s.norm()
    return PhiReport(
        params=Params(p=ctx.p, r=ctx.r, q=ctx.q),
        s=s.codes(),
        s_text=str(s),
        norm=norm.codes(),
        similitude=s.is_similitude(),
        stratum=w.label,
        length=w.length,
        member=in_A(w, norm.as_tuple()),
        phi_prime=str(phi_prime(s, w, ctx)),
        phi=phi_scaled(s, w, ctx),
    )
