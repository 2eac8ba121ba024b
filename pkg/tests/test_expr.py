import pytest
from hypothesis import given, strategies as st

from dmsec.expr import EvalError, Expr, PredicateParseError


@pytest.mark.parametrize("src, env, expected", [
    ("1 + 2 - 4", {}, -1),
    ("-x + 3", {"x": 5}, -2),
    ("(x + 1) mod 2", {"x": 1}, 0),
    ("x % 3", {"x": -1}, 2),
    ("x = 1 and y = 2", {"x": 1, "y": 2}, True),
    ("not x = 1 or y = 2", {"x": 1, "y": 3}, False),
    ("x = 1 => y = 2", {"x": 0, "y": 0}, True),
    ("x = 1 => y = 2", {"x": 1, "y": 0}, False),
    ("a => b => c", {"a": True, "b": True, "c": False}, False),
    ("x ≠ 1 ∧ y ≤ 2", {"x": 0, "y": 2}, True),
    ("¬ (x ≥ 1) ∨ false", {"x": 0}, True),
    ("a ⟹ b", {"a": True, "b": True}, True),
    ("location = Price_Sent", {"location": "Price_Sent"}, True),
    ("location = Price_Sent", {"location": "Init"}, False),
])
def test_evaluation(src, env, expected):
    assert Expr(src).evaluate(env) == expected


def test_precedence_of_and_over_or_over_implication():
    e = Expr("a or b and c => d")
    # (a or (b and c)) => d
    assert e.evaluate({"a": True, "b": False, "c": False, "d": False}) is False
    assert e.evaluate({"a": False, "b": True, "c": False, "d": False}) is True


@pytest.mark.parametrize("src", ["", "1 +", "(x", "x = = 1", "and", "x y", "1 $ 2"])
def test_parse_errors(src):
    with pytest.raises(PredicateParseError):
        Expr(src)


def test_type_errors():
    with pytest.raises(EvalError):
        Expr("x + 1").evaluate({"x": True})
    with pytest.raises(EvalError):
        Expr("x and true").evaluate({"x": 1})
    with pytest.raises(EvalError):
        Expr("1 mod x").evaluate({"x": 0})


def test_names_and_equality():
    e = Expr(" Prod - UB = excess ")
    assert e.names == {"Prod", "UB", "excess"}
    assert e == Expr("Prod - UB = excess")


def test_indexed_compilation():
    f = Expr("r0 + r1").compile_indexed({"r0": 0, "r1": 1})
    assert f((2, 3)) == 5


ints = st.integers(min_value=-50, max_value=50)


@given(ints, ints, ints)
def test_arithmetic_agrees_with_python(x, y, z):
    assert Expr("x + y - z").evaluate({"x": x, "y": y, "z": z}) == x + y - z
    assert Expr("-(x - y)").evaluate({"x": x, "y": y}) == -(x - y)
    if z:
        assert Expr("x mod z").evaluate({"x": x, "z": z}) == x % z


@given(ints, ints)
def test_comparisons_agree_with_python(x, y):
    env = {"x": x, "y": y}
    assert Expr("x < y").evaluate(env) == (x < y)
    assert Expr("x <= y and not x = y").evaluate(env) == (x < y)
    assert Expr("x >= y => x > y or x = y").evaluate(env) is True
