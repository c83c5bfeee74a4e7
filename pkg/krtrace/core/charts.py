"""Semistable resolution charts and per-stratum fiber recipes, kept as data.

Each chart is a ring Z_p[coords][units^-1] / (relations, root relations,
p_equation - p) in which p equals a unit times a monomial in chart
coordinates. Special-fiber points are then exactly the points where some
monomial coordinate vanishes, so the branches through a point are the
vanishing monomial coordinates.

Charts whose ring eliminates a variable through a unit relation record the
elimination in `eliminated`.
"""

import logging
import random
from itertools import product
from math import gcd
from typing import (
    Annotated,
    Dict,
    Iterator,
    List,
    Literal,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import sympy
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    computed_field,
    model_validator,
)

from krtrace.utils.expr import compile_expression, parse_expression

from .errors import ChartError, ExpressionError
from .gf import FieldCtx, FqElement
from .localmodel import COORDINATES
from .report import Params, TabularReport
from .weyl import AdmLabel

logger = logging.getLogger(__name__)

EXHAUSTIVE_BUDGET = 50_000
SAMPLE_SIZE = 4_000
SAMPLE_SEED = 20240601

RECIPE_NAMES = COORDINATES + ("lam",)


class RootRelation(BaseModel):
    """coord^exponent = expr, with exponent an expression in p."""

    model_config = ConfigDict(frozen=True)

    coord: str
    expr: str
    exponent: str = "p-1"

    def degree(self, p: int) -> int:
        return int(sympy.sympify(self.exponent).subs(sympy.Symbol("p"), p))


class UniformizerFactor(BaseModel):
    """coord^(multiplicity * (p-1 if root_power else 1)) in the monomial equal to p."""

    model_config = ConfigDict(frozen=True)

    coord: str
    multiplicity: int = Field(default=1, ge=1)
    root_power: bool = False

    def effective_multiplicity(self, p: int) -> int:
        return self.multiplicity * (p - 1 if self.root_power else 1)


class Chart(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    coords: Tuple[str, ...]
    units: Tuple[str, ...] = ()
    root_relations: Tuple[RootRelation, ...] = ()
    relations: Tuple[str, ...] = ()
    p_equation: str
    unit_factor: str = "1"
    uniformizer_monomial: Tuple[UniformizerFactor, ...]
    eliminated: str = ""
    source: str

    @model_validator(mode="after")
    def _monomial_divisor(self) -> "Chart":
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"Chart {self.name} repeats a coordinate")
        monomial = [f.coord for f in self.uniformizer_monomial]
        if not monomial:
            raise ValueError(f"Chart {self.name} has an empty uniformizer monomial")
        if len(set(monomial)) != len(monomial):
            raise ValueError(f"Chart {self.name} repeats a monomial coordinate")
        stray = [c for c in monomial if c not in self.coords]
        stray += [rel.coord for rel in self.root_relations if rel.coord not in self.coords]
        if stray:
            raise ValueError(
                f"Chart {self.name} is not a monomial divisor in its coordinates: "
                f"{', '.join(stray)}"
            )
        for text in self.expressions():
            try:
                parse_expression(text, self.coords)
            except ExpressionError as e:
                raise ValueError(str(e))
        return self

    def expressions(self) -> List[str]:
        return [
            *self.units,
            *(rel.expr for rel in self.root_relations),
            *self.relations,
            self.p_equation,
            self.unit_factor,
        ]

    def is_tame(self, p: int) -> bool:
        return all(gcd(f.effective_multiplicity(p), p) == 1 for f in self.uniformizer_monomial)

    def monomial_text(self, p: int) -> str:
        return "*".join(
            f"{f.coord}**{f.effective_multiplicity(p)}" for f in self.uniformizer_monomial
        )


# atlas


def _factors(*spec: Union[str, Tuple[str, int]], root: bool = False) -> Tuple[UniformizerFactor, ...]:
    out = []
    for item in spec:
        coord, mult = (item, 1) if isinstance(item, str) else item
        out.append(UniformizerFactor(coord=coord, multiplicity=mult, root_power=root))
    return tuple(out)


def _roots(**relations: str) -> Tuple[RootRelation, ...]:
    return tuple(RootRelation(coord=coord, expr=expr) for coord, expr in relations.items())


def _tower_charts(p: int) -> List[Chart]:
    charts = [
        Chart(
            name="E0",
            coords=("r", "s", "t", "e0", "f"),
            root_relations=_roots(r="e0*f"),
            p_equation="(r**2*s*t)**(p-1)",
            uniformizer_monomial=(
                UniformizerFactor(coord="r", multiplicity=2, root_power=True),
                *_factors("s", "t", root=True),
            ),
            source="third blow-up: the charts over U''[b=1] are Spec Z_p[r,s,t,e,f]/((r^2st)^(p-1)-p, r^(p-1)-ef)",
        )
    ]
    for i in range(1, p - 1):
        charts.append(
            Chart(
                name=f"E{i}",
                coords=("r", "s", "t", f"e{i}", "f"),
                root_relations=(
                    RootRelation(coord="r", expr=f"e{i}*f", exponent=f"p-1-{i}"),
                ),
                p_equation="(r**2*s*t)**(p-1)",
                uniformizer_monomial=(
                    UniformizerFactor(coord="r", multiplicity=2, root_power=True),
                    *_factors("s", "t", root=True),
                ),
                source=f"tower over the worst point: E_{i} = Z_p[r,s,t,e_{i},f]/((r^2st)^(p-1)-p, r^(p-1-{i})-e_{i}f)",
            )
        )
        charts.append(
            Chart(
                name=f"R{i - 1}",
                coords=("rt", "s", "t", f"e{i - 1}", "f"),
                p_equation=f"(rt**2*e{i - 1}**2*s*t)**(p-1)",
                uniformizer_monomial=_factors(
                    ("rt", 2), (f"e{i - 1}", 2), "s", "t", root=True
                ),
                source=f"tower over the worst point: R_{i - 1} = Z_p[rt,s,t,e_{i - 1},f]/((rt^2 e_{i - 1}^2 st)^(p-1)-p)",
            )
        )
    return charts


def _records(p: int) -> List[Chart]:
    return [
        Chart(
            name="U'[b=1]",
            coords=("xt", "a", "b", "c"),
            p_equation="xt*a*b*c",
            uniformizer_monomial=_factors("xt", "a", "b", "c"),
            eliminated="x = xt*b, y = -a*(xt + c), then c renamed for -(xt + c)",
            source="first blow-up: U'[b~=1] = Spec Z_p[x~,a,b,c]/(x~abc-p)",
        ),
        Chart(
            name="U'[x=1]",
            coords=("x", "y", "a", "bt", "c"),
            relations=("a + bt*y + a*bt*c",),
            p_equation="x*y",
            uniformizer_monomial=_factors("x", "y"),
            eliminated="b = bt*x",
            source="first blow-up: U'[x~=1] = Spec Z_p[x,y,a,b~,c]/(a+b~y+ab~c, xy-p)",
        ),
        Chart(
            name="U'[x=1,(1+bc)^-1]",
            coords=("x", "y", "bt", "c"),
            units=("1 + bt*c",),
            p_equation="x*y",
            uniformizer_monomial=_factors("x", "y"),
            eliminated="a = -bt*y/(1 + bt*c)",
            source="shorter resolution: D(1+b~c) in U'[x~=1], Z_p[x,y,b~,c,(1+b~c)^-1]/(xy-p)",
        ),
        Chart(
            name="U'[x=1,b^-1]",
            coords=("x", "a", "bt", "c"),
            units=("bt",),
            p_equation="x*a*c",
            uniformizer_monomial=_factors("x", "a", "c"),
            eliminated="y = -a*(1 + bt*c)/bt",
            source="shorter resolution: D(b~) in U'[x~=1], Z_p[x,a,b~^+-1,c]/(xac-p)",
        ),
        Chart(
            name="cover[1+bc]",
            coords=("x", "y", "bt", "c", "r", "s", "t"),
            units=("1 + bt*c",),
            root_relations=_roots(r="x", s="y", t="1 + bt*c"),
            p_equation="x*y",
            uniformizer_monomial=_factors("r", "s", root=True),
            source="shorter resolution: r^(p-1)-x, s^(p-1)-y, t^(p-1)-(1+b~c) over xy-p",
        ),
        Chart(
            name="cover[b^-1]",
            coords=("x", "a", "bt", "c", "r", "s", "t"),
            units=("bt",),
            root_relations=_roots(r="x", s="a/bt", t="c*bt"),
            p_equation="x*a*c",
            uniformizer_monomial=_factors("r", "s", "t", root=True),
            source="shorter resolution: r^(p-1)-x, s^(p-1)-ab~^-1, t^(p-1)-cb~ over xac-p",
        ),
        Chart(
            name="U''[b=1,v0=1]",
            coords=("u1", "v0", "v1t", "a", "b", "xt"),
            root_relations=_roots(u1="a*xt", v0="b*xt"),
            p_equation="v1t**(p-1)*a*b*xt**2",
            uniformizer_monomial=(
                UniformizerFactor(coord="v1t", root_power=True),
                *_factors("a", "b", ("xt", 2)),
            ),
            source="second blow-up: Z_p[u1,v0,v1~,a,b,x~]/(u1^(p-1)-ax~, v0^(p-1)-bx~, v1~^(p-1)abx~^2-p)",
        ),
        Chart(
            name="U''[b=1,v1=1]",
            coords=("u0", "v1", "v0t", "a", "b", "c"),
            root_relations=_roots(u0="a*c", v1="b*c"),
            p_equation="v0t**(p-1)*a*b*c**2",
            uniformizer_monomial=(
                UniformizerFactor(coord="v0t", root_power=True),
                *_factors("a", "b", ("c", 2)),
            ),
            source="second blow-up: Z_p[u0,v1,v0~,a,b,c]/(u0^(p-1)-ac, v1^(p-1)-bc, v0~^(p-1)abc^2-p)",
        ),
        Chart(
            name="U''[x=1,v0=1]",
            coords=("bt", "c", "u1", "v0", "v1t"),
            root_relations=_roots(v1t="1 + bt*c"),
            p_equation="(u1*v0*v1t)**(p-1)",
            uniformizer_monomial=_factors("u1", "v0", "v1t", root=True),
            source="second blow-up: Z_p[b~,c,u1,v0,v1~]/((u1v0v1~)^(p-1)-p, v1~^(p-1)-(1+b~c))",
        ),
        Chart(
            name="U''[x=1,v1=1]",
            coords=("bt", "c", "u0", "v1", "v0t"),
            units=("v0t",),
            root_relations=_roots(v0t="1 + bt*c"),
            p_equation="(u0*v1*v0t)**(p-1)",
            unit_factor="v0t**(p-1)",
            uniformizer_monomial=_factors("u0", "v1", root=True),
            source="second blow-up: Z_p[b~,c,u0,v1,v0~^+-1]/((u0v1v0~)^(p-1)-p, v0~^(p-1)-(1+b~c))",
        ),
        *_tower_charts(p),
        Chart(
            name="s010-open",
            coords=("y", "a", "c", "u0", "v0", "v1"),
            units=("y", "y + a*c"),
            root_relations=_roots(v0="y", v1="y + a*c"),
            p_equation="u0**(p-1)",
            uniformizer_monomial=_factors("u0", root=True),
            source="length 3 trace: two (p-1)-th roots of units and one (p-1)-th root of p",
        ),
        Chart(
            name="s01-open",
            coords=("y", "a", "u0", "u1", "v1"),
            units=("y", "a"),
            root_relations=_roots(u0="y"),
            p_equation="(u1*v1)**(p-1)",
            uniformizer_monomial=_factors("u1", "v1", root=True),
            source="length 2 trace: Z_p[y^+-1,a^+-1,u0,u1,v1]/((u1v1)^(p-1)-p, u0^(p-1)-y)",
        ),
        Chart(
            name="s02-cover",
            coords=("a", "b", "x", "c", "u0", "v0", "t"),
            units=("a", "b"),
            root_relations=_roots(u0="c", v0="x", t="a/b"),
            p_equation="x*c",
            uniformizer_monomial=_factors("u0", "v0", root=True),
            source="s02 trace: xc-p, u0^(p-1)-c, v0^(p-1)-x, t^(p-1)-a/b",
        ),
        Chart(
            name="s0s2-cover",
            coords=("x", "a", "b", "c", "r", "s", "t"),
            units=("b",),
            root_relations=_roots(r="a", s="x", t="c"),
            p_equation="a*x*c",
            uniformizer_monomial=_factors("r", "s", "t", root=True),
            source="s0/s2 trace: axc-p, r^(p-1)-a, s^(p-1)-x, t^(p-1)-c",
        ),
    ]


def atlas(p: int) -> List[Chart]:
    """The fixed atlas; the tower charts E_i, R_(i-1) depend on p.

    Raises:
        ChartError: If a chart record fails validation
    """
    try:
        return _records(p)
    except ValidationError as e:
        raise ChartError(f"Malformed chart record: {e}")


def chart_by_name(name: str, p: int) -> Chart:
    for chart in atlas(p):
        if chart.name == name:
            return chart
    raise KeyError(name)


# validation


class ChartValidation(BaseModel):
    name: str
    source: str
    tame: bool
    identity: bool
    mode: str
    points: int
    special_points: int
    witness: Optional[Dict[str, int]] = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.tame and self.identity and self.witness is None


def _reduce_roots(expr: sympy.Expr, chart: Chart, p: int) -> sympy.Expr:
    """Replace coord^k by coord^(k mod e) * value^(k div e) for each root relation."""
    for rel in chart.root_relations:
        sym = sympy.Symbol(rel.coord)
        e = rel.degree(p)
        value = parse_expression(rel.expr, chart.coords, p)
        expr = sympy.expand(expr).replace(
            lambda n: n.is_Pow and n.base == sym and n.exp.is_Integer and n.exp >= e,
            lambda n: sym ** (int(n.exp) % e) * value ** (int(n.exp) // e),
        )
        if e == 1:
            expr = expr.subs(sym, value)
    return expr


def check_identity(chart: Chart, p: int, samples: int = 8, seed: int = SAMPLE_SEED) -> bool:
    """Monomial times unit factor equals the p-equation once root relations are used.

    Checked symbolically, then at random nonzero rational points.
    """
    monomial = parse_expression(chart.monomial_text(p), chart.coords, p)
    unit = parse_expression(chart.unit_factor, chart.coords, p)
    target = parse_expression(chart.p_equation, chart.coords, p)
    lhs = _reduce_roots(monomial * unit, chart, p)
    rhs = _reduce_roots(target, chart, p)
    if sympy.cancel(lhs - rhs) != 0:
        return False
    rng = random.Random(seed)
    symbols = [sympy.Symbol(c) for c in chart.coords]
    for _ in range(samples):
        values = {s: sympy.Rational(rng.randint(1, 9), rng.randint(1, 9)) for s in symbols}
        try:
            if sympy.nsimplify(lhs.subs(values) - rhs.subs(values)) != 0:
                return False
        except ZeroDivisionError:
            continue
    return True


def _root_table(ctx: FieldCtx, exponent: int) -> Dict[int, List[FqElement]]:
    table: Dict[int, List[FqElement]] = {}
    for t in ctx.elements():
        table.setdefault((t**exponent).code, []).append(t)
    return table


def _chart_points(
    chart: Chart, ctx: FieldCtx, rng: Optional[random.Random]
) -> Iterator[Dict[str, FqElement]]:
    """Points of the chart over F_q: free coordinates then every root choice."""
    p = ctx.p
    root_coords = [rel.coord for rel in chart.root_relations]
    free = [c for c in chart.coords if c not in root_coords]
    solvers = [
        (rel.coord, compile_expression(rel.expr, chart.coords, p), _root_table(ctx, rel.degree(p)))
        for rel in chart.root_relations
    ]
    elems = ctx.elements()
    if rng is None:
        assignments: Iterator[Sequence[FqElement]] = product(elems, repeat=len(free))
    else:
        assignments = ([rng.choice(elems) for _ in free] for _ in range(SAMPLE_SIZE))
    for values in assignments:
        env = dict(zip(free, values))
        options: List[List[FqElement]] = []
        try:
            for coord, fn, table in solvers:
                options.append(table.get(fn(env, ctx).code, []))
        except ZeroDivisionError:
            continue
        for roots in product(*options):
            point = dict(env)
            point.update(zip(root_coords, roots))
            yield point


def validate_chart(chart: Chart, ctx: FieldCtx) -> ChartValidation:
    """Tameness, the uniformizer identity, and vanishing of a monomial coordinate.

    Exhaustive over the free coordinates when that fits the budget, otherwise
    seeded random sampling. A failing point is reported as a witness.
    """
    p = ctx.p
    root_coords = {rel.coord for rel in chart.root_relations}
    free = len([c for c in chart.coords if c not in root_coords])
    exhaustive = ctx.q**free <= EXHAUSTIVE_BUDGET
    rng = None if exhaustive else random.Random(SAMPLE_SEED)

    units = [compile_expression(u, chart.coords, p) for u in chart.units]
    relations = [compile_expression(r, chart.coords, p) for r in chart.relations]
    p_eq = compile_expression(chart.p_equation, chart.coords, p)
    monomial = [f.coord for f in chart.uniformizer_monomial]

    points = special = 0
    witness: Optional[Dict[str, int]] = None
    for env in _chart_points(chart, ctx, rng):
        try:
            if any(not u(env, ctx) for u in units):
                continue
            if any(rel(env, ctx) for rel in relations):
                continue
            points += 1
            if p_eq(env, ctx):
                continue
        except ZeroDivisionError:
            continue
        special += 1
        if all(env[c] for c in monomial):
            witness = {name: value.code for name, value in env.items()}
            break

    result = ChartValidation(
        name=chart.name,
        source=chart.source,
        tame=chart.is_tame(p),
        identity=check_identity(chart, p),
        mode="exhaustive" if exhaustive else "sampled",
        points=points,
        special_points=special,
        witness=witness,
    )
    logger.info(
        "Chart %s over F_%d: %s (%d special points)",
        chart.name,
        ctx.q,
        "pass" if result.passed else "FAIL",
        special,
    )
    return result


class AtlasReport(TabularReport):
    params: Params
    charts: List[ChartValidation]
    missing: List[str] = []
    verdict: Literal["pass", "fail"]

    def title(self) -> str:
        return f"Resolution atlas over F_{self.params.q}"

    def summary(self) -> List[str]:
        lines = [f"verdict: {self.verdict}"]
        if self.missing:
            lines.append(f"charts named by recipes but absent: {', '.join(self.missing)}")
        return lines

    def table(self) -> Tuple[List[str], List[List[str]]]:
        header = ["chart", "mode", "special", "tame", "identity", "verdict", "source"]
        rows = [
            [
                c.name,
                c.mode,
                str(c.special_points),
                "yes" if c.tame else "no",
                "yes" if c.identity else "no",
                "pass" if c.passed else f"fail {c.witness or ''}",
                c.source,
            ]
            for c in self.charts
        ]
        return header, rows

    def failed(self) -> bool:
        return self.verdict == "fail"


class ChartListing(TabularReport):
    params: Params
    charts: List[Chart]

    def title(self) -> str:
        return f"Resolution atlas for p = {self.params.p}"

    def summary(self) -> List[str]:
        return [f"charts: {len(self.charts)}"]

    def table(self) -> Tuple[List[str], List[List[str]]]:
        p = self.params.p
        header = ["chart", "coordinates", "p =", "source"]
        rows = [
            [c.name, ",".join(c.coords), c.monomial_text(p), c.source]
            for c in self.charts
        ]
        return header, rows


def list_atlas(ctx: FieldCtx) -> ChartListing:
    return ChartListing(params=Params(p=ctx.p, r=ctx.r, q=ctx.q), charts=atlas(ctx.p))


def validate_atlas(
    ctx: FieldCtx, charts: Optional[Sequence[Chart]] = None
) -> AtlasReport:
    """Validate every chart and check that the recipes only name atlas charts."""
    records = atlas(ctx.p) if charts is None else charts
    results = [validate_chart(chart, ctx) for chart in records]
    missing = atlas_closure(ctx.p, records)
    ok = all(r.passed for r in results) and not missing
    return AtlasReport(
        params=Params(p=ctx.p, r=ctx.r, q=ctx.q),
        charts=results,
        missing=missing,
        verdict="pass" if ok else "fail",
    )


# fiber recipes


class RootSegment(BaseModel):
    """Points of the fiber: product of root counts of the units, each with `branches` branches."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["roots"] = "roots"
    description: str
    chart: str
    units: Tuple[str, ...] = ()
    branches: int = Field(ge=1)


class SweepSegment(BaseModel):
    """A P^1 of points (1:lam), lam in F_q^x; where the unit vanishes one point is degenerate."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sweep"] = "sweep"
    description: str
    chart: str
    unit: str
    branches: int = Field(ge=1)
    degenerate_branches: int = Field(ge=1)


class TowerSegment(BaseModel):
    """The (0:1) point over the worst point, resolved by the E_i / R_i tower."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["tower"] = "tower"
    description: str
    chart: str = "E0"

    def charts(self, p: int) -> List[str]:
        names = ["U''[b=1,v0=1]", "U''[b=1,v1=1]", self.chart]
        for j in range(1, p - 1):
            names += [f"E{j}", f"R{j - 1}"]
        return names


FiberSegment = Annotated[
    Union[RootSegment, SweepSegment, TowerSegment], Field(discriminator="kind")
]


class FiberRecipe(BaseModel):
    model_config = ConfigDict(frozen=True)

    stratum: AdmLabel
    segments: Tuple[FiberSegment, ...]

    @model_validator(mode="after")
    def _point_coordinates_only(self) -> "FiberRecipe":
        for seg in self.segments:
            texts = seg.units if isinstance(seg, RootSegment) else ()
            texts += (seg.unit,) if isinstance(seg, SweepSegment) else ()
            for text in texts:
                try:
                    parse_expression(text, RECIPE_NAMES)
                except ExpressionError as e:
                    raise ValueError(str(e))
        return self

    def chart_names(self, p: int) -> List[str]:
        names: List[str] = []
        for seg in self.segments:
            names += seg.charts(p) if isinstance(seg, TowerSegment) else [seg.chart]
        return names


def _length3(label: AdmLabel, first: str, second: str) -> FiberRecipe:
    return FiberRecipe(
        stratum=label,
        segments=(
            RootSegment(
                description="roots of two units, one root of p",
                chart="s010-open",
                units=(first, second),
                branches=1,
            ),
        ),
    )


def _length2(label: AdmLabel, unit: str, chart: str = "s01-open") -> FiberRecipe:
    return FiberRecipe(
        stratum=label,
        segments=(
            RootSegment(
                description="roots of one unit, two branches",
                chart=chart,
                units=(unit,),
                branches=2,
            ),
        ),
    )


def _exceptional_line(label: AdmLabel, last: FiberSegment) -> FiberRecipe:
    return FiberRecipe(
        stratum=label,
        segments=(
            SweepSegment(
                description="(1:lam)",
                chart="cover[b^-1]",
                unit="1 + c*lam",
                branches=2,
                degenerate_branches=3,
            ),
            RootSegment(description="(1:0)", chart="cover[1+bc]", units=("1",), branches=2),
            last,
        ),
    )


RECIPES: Dict[AdmLabel, FiberRecipe] = {
    AdmLabel.S010: _length3(AdmLabel.S010, "y + a*c", "y"),
    AdmLabel.S102: _length3(AdmLabel.S102, "x", "y + a*c"),
    AdmLabel.S201: _length3(AdmLabel.S201, "x + b*c", "y"),
    AdmLabel.S212: _length3(AdmLabel.S212, "x", "x + b*c"),
    AdmLabel.S01: _length2(AdmLabel.S01, "y"),
    AdmLabel.S12: _length2(AdmLabel.S12, "x"),
    AdmLabel.S10: _length2(AdmLabel.S10, "y + a*c"),
    AdmLabel.S21: _length2(AdmLabel.S21, "x + b*c"),
    AdmLabel.S02: _length2(AdmLabel.S02, "a/b", chart="s02-cover"),
    AdmLabel.S0: FiberRecipe(
        stratum=AdmLabel.S0,
        segments=(RootSegment(description="single point", chart="s0s2-cover", branches=3),),
    ),
    AdmLabel.S2: FiberRecipe(
        stratum=AdmLabel.S2,
        segments=(RootSegment(description="single point", chart="s0s2-cover", branches=3),),
    ),
    AdmLabel.S1: _exceptional_line(
        AdmLabel.S1,
        RootSegment(description="(0:1)", chart="U''[b=1,v1=1]", branches=3),
    ),
    AdmLabel.TAU: _exceptional_line(AdmLabel.TAU, TowerSegment(description="(0:1)")),
}


def fiber_recipe(label: AdmLabel) -> FiberRecipe:
    return RECIPES[label]


def atlas_closure(p: int, charts: Optional[Sequence[Chart]] = None) -> List[str]:
    """Chart names referenced by recipes but missing from the atlas."""
    known = {chart.name for chart in (atlas(p) if charts is None else charts)}
    missing = []
    for recipe in RECIPES.values():
        missing += [name for name in recipe.chart_names(p) if name not in known]
    return sorted(set(missing))
