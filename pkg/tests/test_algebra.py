from fractions import Fraction

import pytest

from lib.general import random_rational
from symmetry import expr as ex
from symmetry.algebra import LieAlgebra, bracket, combination_str, jacobi, parse_combination
from symmetry.errors import ClosureError, SpecError
from symmetry.jet import VectorField
from symmetry.parser import parse

s = ex.symbol("s")
a1, a2, a3 = ex.symbol("a1"), ex.symbol("a2"), ex.symbol("a3")


@pytest.fixture(scope="module")
def alg(g4):
    return g4.algebra


def combination(text, alg):
    return parse_combination(text, alg.names)


def test_commutator_table(alg):
    table = alg.commutator_table()
    assert table[0][2] == [2, 0, 0, 0]
    assert table[1][2] == [0, 1, 0, 0]
    assert table[2][0] == [-2, 0, 0, 0]
    nonzero = {(i, j) for i in range(4) for j in range(4) if any(table[i][j])}
    assert nonzero == {(0, 2), (2, 0), (1, 2), (2, 1)}
    assert alg.jacobi_residuals() == []


def test_jacobi_identity(alg):
    X, Y, Z = alg.basis[0], alg.basis[2], alg.basis[3]
    assert jacobi(X, Y, Z).is_zero
    assert bracket(X, X).is_zero


def test_adjoint_table(alg):
    assert alg.adjoint(2, 0) == combination("exp(2*s)*Y1", alg)
    assert alg.adjoint(2, 1) == combination("exp(s)*Y2", alg)
    assert alg.adjoint(0, 2) == combination("Y3 - 2*s*Y1", alg)
    assert alg.adjoint(1, 2) == combination("Y3 - s*Y2", alg)
    assert alg.adjoint(3, 2) == combination("Y3", alg)


def test_adjoint_inverse(alg):
    for i in range(alg.dim):
        for j in range(alg.dim):
            forward = alg.adjoint(i, j)
            back = alg.act(i, forward, ex.neg(s))
            assert back == [ex.const(int(k == j)) for k in range(alg.dim)]
    assert all(alg.is_automorphism(i) for i in range(alg.dim))


def test_killing_form(alg):
    assert alg.killing_form() == parse("5*a3*b3")
    assert not alg.is_semisimple()


def test_killing_form_is_symmetric_bilinear(alg, rng):
    K = alg.killing_matrix()
    assert all(K[i][j] == K[j][i] for i in range(alg.dim) for j in range(alg.dim))
    for _ in range(20):
        v, v2, w = ([random_rational(rng) for _ in range(alg.dim)] for _ in range(3))
        a, b = random_rational(rng), random_rational(rng)
        mixed = [a * p + b * q for p, q in zip(v, v2)]
        assert alg.killing_form(v, w) == alg.killing_form(w, v)
        assert alg.killing_form(mixed, w) == ex.add(ex.mul(a, alg.killing_form(v, w)),
                                                    ex.mul(b, alg.killing_form(v2, w)))


def test_derived_series(alg):
    series = alg.derived_series()
    assert len(series) == 3
    assert [list(row) for row in series[1]] == [[1, 0, 0, 0], [0, 1, 0, 0]]
    assert series[2] == []
    assert alg.is_solvable()
    center = alg.center()
    assert len(center) == 1 and list(center[0][:3]) == [0, 0, 0] and center[0][3] != 0


def test_reduce(alg):
    steps = [("Y1", ex.div(a1, 2)), ("Y2", a2)]
    assert alg.reduce([a1, a2, 1, 0], steps) == [ex.ZERO, ex.ZERO, ex.ONE, ex.ZERO]
    residual = alg.reduce([a1, a2, a3, 1], steps)
    assert residual[0] == ex.mul(a1, ex.sub(1, a3))
    assert residual[1] == ex.mul(a2, ex.sub(1, a3))


def test_search_finds_missing_factor(alg):
    report = alg.search_reduction([a1, a2, a3, 1], ["Y1", "Y2"], max_length=2, nonzero={"a3"})
    assert report.reducible
    witness = report.witness
    assert witness.sequence == ["Y1", "Y2"]
    assert witness.solutions[0] == (ex.symbol("s1"), ex.div(a1, ex.mul(2, a3)))


def test_search_reports_component_never_cancelled(alg):
    report = alg.search_reduction([a1, 0, 0, 1], ["Y1"], max_length=2, nonzero={"a1"})
    assert not report.reducible
    assert report.never_cancelled == [0]


def test_scalings(alg):
    alpha = ex.symbol("alpha")
    report = alg.search_reduction([alpha, 1, 0, 0], ["Y1"], max_length=1, nonzero={"alpha"})
    assert report.scalings == [("Y1", "Y2", "Y3", Fraction(1))]


def test_combination_strings(alg):
    assert combination_str(alg.adjoint(0, 2), alg.names) == "-2*s*Y1 + Y3"
    assert combination_str([0, 0, 0, 0], alg.names) == "0"
    with pytest.raises(SpecError):
        parse_combination("Y1*Y2", alg.names)


def test_closure_error():
    coords = ("t", "x")
    t = ex.symbol("t")
    with pytest.raises(ClosureError):
        LieAlgebra([VectorField(coords, {"t": 1}), VectorField(coords, {"x": ex.power(t, 2)})])
