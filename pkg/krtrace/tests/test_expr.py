from itertools import product

import pytest

from krtrace.core.errors import ExpressionError
from krtrace.core.gf import make_field
from krtrace.utils.expr import compile_expression, parse_expression

NAMES = ("x", "y", "a", "b", "c")


@pytest.fixture
def f9():
    """F_9"""
    return make_field(3, 2)


def test_compiled_matches_direct(f9):
    """Test a compiled relation against direct field arithmetic"""
    relation = compile_expression("a*x + b*y + a*b*c", NAMES, f9.p)
    for codes in product(range(9), repeat=3):
        x, a, c = (f9.from_code(k) for k in codes)
        y, b = f9.one, f9.generator
        env = {"x": x, "y": y, "a": a, "b": b, "c": c}
        assert relation(env, f9) == a * x + b * y + a * b * c


def test_p_in_exponents(f9):
    """Test that p is substituted before compiling"""
    expr = parse_expression("x**(p-1)", NAMES, 3)
    assert expr == parse_expression("x**2", NAMES)
    power = compile_expression("(x*y)**(p-1)", NAMES, f9.p)
    z = f9.from_code(3)
    assert power({"x": z, "y": f9.one}, f9) == z * z


def test_symbolic_p_kept_when_unknown():
    """Test that p stays free when not supplied"""
    expr = parse_expression("x**(p-1)", NAMES)
    assert "p" in {str(sym) for sym in expr.free_symbols}


def test_rational_constants(f9):
    """Test that rationals map into the prime field"""
    half = compile_expression("x/2", NAMES, f9.p)
    assert half({"x": f9.one}, f9) == f9.from_int(2)


def test_zero_denominator(f9):
    """Test that division by zero surfaces at evaluation time"""
    quotient = compile_expression("a/b", NAMES, f9.p)
    with pytest.raises(ZeroDivisionError):
        quotient({"a": f9.one, "b": f9.zero}, f9)


@pytest.mark.parametrize("text", ["x +", "w*x", "x**y", "sin(x)"])
def test_bad_expressions(f9, text):
    """Test parse and compile errors"""
    with pytest.raises(ExpressionError):
        compile_expression(text, NAMES, f9.p)
