"""Compile chart and recipe expressions into evaluators over F_q.

Expressions are written in sympy syntax over named coordinates, with the
symbol p allowed in exponents (e.g. "(r**2*s*t)**(p-1)"). Once p is fixed the
tree is turned into nested closures, so evaluation never goes through floats.
"""

from functools import lru_cache
from typing import Callable, Mapping, Optional, Tuple

import sympy

from krtrace.core.errors import ExpressionError
from krtrace.core.gf import FieldCtx, FqElement

P = sympy.Symbol("p")

Env = Mapping[str, FqElement]
Evaluator = Callable[[Env, FieldCtx], FqElement]


@lru_cache(maxsize=None)
def parse_expression(text: str, names: Tuple[str, ...], p: Optional[int] = None) -> sympy.Expr:
    """Parse text over the given coordinate names, substituting p when known.

    Raises:
        ExpressionError: On syntax errors or symbols outside names and p
    """
    local = {name: sympy.Symbol(name) for name in names}
    local["p"] = P
    try:
        expr = sympy.sympify(text, locals=local)
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ExpressionError(f"Failed to parse expression {text!r}: {e}")
    if p is not None:
        expr = expr.subs(P, p)
    allowed = set(names) if p is not None else set(names) | {"p"}
    unknown = {str(sym) for sym in expr.free_symbols} - allowed
    if unknown:
        raise ExpressionError(
            f"Expression {text!r} uses unknown symbols: {', '.join(sorted(unknown))}"
        )
    return expr


def _build(node: sympy.Expr) -> Evaluator:
    if node.is_Integer:
        n = int(node)
        return lambda env, ctx: ctx.from_int(n)
    if node.is_Rational:
        num, den = int(node.p), int(node.q)
        return lambda env, ctx: ctx.from_int(num) / ctx.from_int(den)
    if node.is_Symbol:
        name = node.name
        return lambda env, ctx: env[name]
    if node.is_Add or node.is_Mul:
        parts = [_build(arg) for arg in node.args]
        add = bool(node.is_Add)

        def combine(env: Env, ctx: FieldCtx) -> FqElement:
            acc = parts[0](env, ctx)
            for part in parts[1:]:
                acc = acc + part(env, ctx) if add else acc * part(env, ctx)
            return acc

        return combine
    if node.is_Pow:
        if not node.exp.is_Integer:
            raise ExpressionError(f"Exponent of {node} is not an integer")
        base, k = _build(node.base), int(node.exp)
        return lambda env, ctx: base(env, ctx) ** k
    raise ExpressionError(f"Unsupported expression node: {node}")


@lru_cache(maxsize=None)
def compile_expression(text: str, names: Tuple[str, ...], p: int) -> Evaluator:
    """Evaluator for text; raises ZeroDivisionError at runtime on a zero denominator."""
    return _build(parse_expression(text, names, p))
