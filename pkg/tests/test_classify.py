import pytest

from symmetry import expr as ex
from symmetry.classify import (feasibility, functionally_dependent, invariant_check, invariants, jacobian_rank,
                               optimal_rows, project)
from symmetry.errors import UnsupportedShapeError
from symmetry.jet import VectorField
from symmetry.parser import parse

x, u, E, h, c = (ex.symbol(n) for n in ("x", "u", "E", "h", "c"))


@pytest.fixture(scope="module")
def reps(g4):
    return dict(g4.representative_fields())


def test_projection(reps):
    Z = project(reps["A3"])
    assert Z.coords == ("x", "u", "E", "h")
    assert Z["x"] == x and Z["h"] == ex.mul(-2, h)
    assert project(reps["A1"]).is_zero


def test_translation_invariants(reps):
    Z = project(reps["A2"])
    invs = invariants(Z)
    assert invs == [u, E, h]
    feas = feasibility(Z, invs)
    assert feas
    assert feas.E_form == ex.func("phi", ("u",))
    assert feas.h_form == c


def test_scaling_invariants(reps):
    Z = project(reps["A3"])
    invs = invariants(Z)
    assert invs == [u, E, parse("h*x^2")]
    assert all(invariant_check(Z, I) for I in invs)
    feas = feasibility(Z, invs)
    assert feas.feasible
    assert feas.h_form == parse("c^2*x^(-2)")


def test_conductivity_only(reps):
    Z = project(reps["A4"])
    feas = feasibility(Z, invariants(Z))
    assert not feas
    assert feas.reason == "no invariant involves E"


def test_mixed_scaling_blocks_E(reps):
    Z = project(reps["A6"])
    invs = invariants(Z)
    assert all(invariant_check(Z, I) for I in invs)
    feas = feasibility(Z, invs)
    assert not feas
    assert "depends on" in feas.reason and "x" in feas.reason
    assert feas.blocking is not None


def test_worked_field_matches_negative_beta(g4, reps):
    beta = ex.symbol("beta")
    at_minus_one = project(reps["A6"]).map(lambda v: ex.substitute(v, beta, ex.const(-1)))
    assert project(g4.fields["Z4w"]) == at_minus_one


def test_unsupported_shape():
    Z = VectorField(("x", "h"), {"x": parse("x^2"), "h": parse("h")})
    with pytest.raises(UnsupportedShapeError):
        invariants(Z)


def test_invariant_check():
    Z = VectorField(("x", "h"), {"x": x, "h": ex.mul(-2, h)})
    assert invariant_check(Z, parse("h*x^2"))
    assert not invariant_check(Z, parse("h*x"))


def test_jacobian_rank():
    coords = ("x", "u", "E", "h")
    assert jacobian_rank([u, E, parse("h*x^2")], coords) == 3
    assert jacobian_rank([u, parse("2*u")], coords) == 1
    assert functionally_dependent(parse("h*x^2"), parse("h^(1/2)*x"), ("x", "h"))
    assert not functionally_dependent(parse("h*x^2"), parse("h*x"), ("x", "h"))


def test_optimal_rows(g4, fin_spec):
    rows, excluded = optimal_rows(g4.representative_fields(), fin_spec)
    assert excluded == ["A1"]
    assert [row.sources for row in rows] == [["A2", "A5"], ["A3"], ["A4"], ["A6"]]
    feasible = [row for row in rows if row.feasible]
    assert [row.sources[0] for row in feasible] == ["A2", "A3"]
    assert all(row.verified for row in feasible)
    assert len(rows[0].operators) == 2
    assert rows[2].equation is None
