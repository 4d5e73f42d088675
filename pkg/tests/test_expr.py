from fractions import Fraction

import pytest

from lib.general import random_rational
from symmetry import expr as ex
from symmetry.errors import DependencyError, NonPolynomialError, SubstitutionError
from symmetry.parser import evaluate_tree, parse, parse_tree, tree_names

x, y, h = ex.symbol("x"), ex.symbol("y"), ex.symbol("h")


def random_expr(rng, terms=3):
    leaves = [x, y, ex.exp(x), ex.exp(ex.mul(-1, y)), ex.power(x, 2)]
    out = []
    for _ in range(rng.randint(1, terms)):
        factors = [rng.choice(leaves) for _ in range(rng.randint(1, 2))]
        out.append(ex.mul(Fraction(rng.randint(-9, 9), rng.randint(1, 4)), *factors))
    return ex.add(*out)


def test_like_terms_combine():
    assert ex.add(x, x) == ex.mul(2, x)
    assert ex.sub(ex.mul(3, x, y), ex.mul(y, 3, x)).is_zero
    assert ex.mul(ex.power(x, 2), ex.power(x, -2)) == ex.ONE
    assert ex.to_string(ex.sub(x, y)) == "x - y"


def test_exp_log():
    assert ex.exp(ex.log(x)) == x
    assert ex.log(ex.exp(x)) == x
    assert ex.mul(ex.exp(x), ex.exp(ex.neg(x))) == ex.ONE
    assert ex.exp(ex.mul(2, ex.log(x))) == ex.power(x, 2)
    with pytest.raises(ValueError):
        ex.log(ex.const(-1))


def test_constant_powers():
    assert ex.power(ex.const(8), Fraction(1, 3)) == ex.const(2)
    assert isinstance(ex.power(ex.const(2), Fraction(1, 2)), ex.Power)
    assert ex.power(ex.const(12), Fraction(1, 2)) == ex.mul(2, ex.power(ex.const(3), Fraction(1, 2)))


def test_roots_of_large_constants():
    # past the float range
    assert ex.power(ex.const(7 ** 500), Fraction(1, 5)) == ex.const(7 ** 100)
    assert ex.power(ex.const(3 ** 800), Fraction(1, 2)) == ex.const(3 ** 400)
    assert ex.power(ex.const(2 * 3 ** 800), Fraction(1, 2)) == ex.mul(3 ** 400, ex.power(ex.const(2), Fraction(1, 2)))
    assert ex.power(ex.const(Fraction(1, 5 ** 600)), Fraction(1, 3)) == ex.const(Fraction(1, 5 ** 200))


def test_radicals_need_positivity():
    square = ex.power(h, 2)
    assert isinstance(ex.power(square, Fraction(1, 2)), ex.Power)
    assert ex.power(square, Fraction(1, 2), positive={"h"}) == h
    assert ex.canonicalize(ex.power(square, Fraction(1, 2)), positive={"h"}) == h


def test_differentiate():
    assert ex.differentiate(ex.mul(x, x), "x") == ex.mul(2, x)
    assert ex.differentiate(ex.exp(ex.mul(2, x)), x) == ex.mul(2, ex.exp(ex.mul(2, x)))
    assert ex.differentiate(ex.log(x), "x") == ex.power(x, -1)
    assert ex.differentiate(ex.mul(x, y), "z").is_zero


def test_function_atoms():
    F = ex.func("F", ("a", "b"))
    assert ex.differentiate(F, "b") == ex.func("F", ("a", "b"), ("b",))
    assert ex.func("F", ("a", "b"), ("b", "a")).index == ("a", "b")
    assert ex.differentiate(F, "c").is_zero
    with pytest.raises(DependencyError):
        ex.func("F", ("a",), ("x",))


def test_chain_rule_through_function_atom():
    u = ex.symbol("u")
    E = ex.func("E", ("u",))
    e = ex.differentiate(ex.mul(E, ex.power(u, 2)), "u")
    assert e == ex.add(ex.mul(ex.func("E", ("u",), ("u",)), ex.power(u, 2)), ex.mul(2, u, E))
    assert ex.substitute_function(e, "E", ex.exp(u)) == ex.mul(ex.exp(u), ex.add(ex.power(u, 2), ex.mul(2, u)))


def test_collect():
    a, b = ex.symbol("a"), ex.symbol("b")
    grouped = ex.collect(ex.add(ex.mul(a, x), x, b), [x])
    assert grouped == {x: ex.add(a, 1), ex.ONE: b}
    with pytest.raises(NonPolynomialError):
        ex.collect(ex.exp(x), [x])


def test_substitute():
    assert ex.substitute(ex.mul(x, y), x, 2) == ex.mul(2, y)
    assert ex.substitute_many(ex.add(x, y), {x: y, y: x}) == ex.add(x, y)
    with pytest.raises(SubstitutionError):
        ex.substitute(x, ex.add(x, 1), y)


def test_evaluate_keeps_exp_formal():
    assert ex.evaluate(ex.mul(x, y), {x: 2, y: 3}) == ex.const(6)
    assert ex.evaluate(ex.exp(x), {x: 1}) == ex.exp(ex.ONE)
    assert ex.evaluate(ex.exp(x), {x: 0}) == ex.ONE


def test_leibniz_and_linearity(rng):
    for _ in range(100):
        a, b = random_expr(rng), random_expr(rng)
        k = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
        lhs = ex.differentiate(ex.mul(a, b), "x")
        rhs = ex.add(ex.mul(ex.differentiate(a, "x"), b), ex.mul(a, ex.differentiate(b, "x")))
        assert lhs == rhs
        assert ex.differentiate(ex.add(a, ex.mul(k, b)), "y") == ex.add(
            ex.differentiate(a, "y"), ex.mul(k, ex.differentiate(b, "y")))


IDENTITIES = [
    "(x+1)*(x-1)/(x^2+1) - (x^2-1)/(x^2+1)",
    "x^-2*(x^3+x)^2",
    "(x+y)^3 - x^3 - 3*x^2*y - 3*x*y^2 - y^3",
    "(x - y)*(x + y)/(x^2 + y^2 + 1)",
    "2^3^2*x/(4*y) - (x*y)^2/x^2",
    "1/(1/x^2 + 1/y^2) + -(-x)*y",
    "((x+2*y)^2 - (x-2*y)^2)/(8*y)",
]


@pytest.mark.parametrize("text", IDENTITIES)
def test_canonical_form_matches_raw_tree(rng, text):
    tree = parse_tree(text)
    e = parse(text)
    names = sorted(tree_names(tree))
    for _ in range(100):
        point = {n: random_rational(rng) for n in names}
        raw = evaluate_tree(tree, point)
        assert ex.evaluate(e, {ex.symbol(n): v for n, v in point.items()}) == ex.const(raw)


def test_expanded_cube():
    lhs = ex.power(ex.add(x, y), 3)
    rhs = ex.add(ex.power(x, 3), ex.mul(3, ex.power(x, 2), y), ex.mul(3, x, ex.power(y, 2)), ex.power(y, 3))
    assert lhs == rhs
    assert parse("(x+y)^3 - x^3 - 3*x^2*y - 3*x*y^2 - y^3").is_zero
