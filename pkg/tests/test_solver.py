from fractions import Fraction

import pytest

from symmetry import expr as ex
from symmetry.algebra import LieAlgebra, span_rank
from symmetry.detsys import determining_system
from symmetry.errors import NonlinearSystemError
from symmetry.jet import VectorField
from symmetry.parser import parse
from symmetry.problem import AnsatzSpec
from symmetry.solver import instantiate, linear_equations, solve, solve_spec, unrestricted_point_check


def fields(coords, *specs):
    return [VectorField(coords, {c: parse(v) for c, v in spec.items()}) for spec in specs]


def spans(space, expected):
    return span_rank(space.basis + expected) == space.dimension == len(expected)


def test_instantiate(fin_spec):
    field, constants = instantiate(fin_spec, AnsatzSpec(1))
    # xi1, xi2 over (t, x) and eta over (t, x, u), degree 1
    assert len(constants) == 3 + 3 + 4
    assert field["t"].free_symbols == {"c0", "c1", "c2", "t", "x"}


def test_linear_equations():
    a, b, x = ex.symbol("a"), ex.symbol("b"), ex.symbol("x")
    rows = linear_equations([ex.add(ex.mul(a, x), b), ex.mul(a, x)], [a, b])
    assert rows == [[1, 0], [0, 1]]
    with pytest.raises(NonlinearSystemError):
        linear_equations([ex.mul(a, b)], [a, b])


def test_principal_algebra(fin_spec):
    space = solve_spec(fin_spec, AnsatzSpec(3))
    assert space.dimension == 1
    assert spans(space, fields(fin_spec.coordinates, {"t": "1"}))
    assert space.verified
    assert space.stable and space.probe_dimension == 1
    assert LieAlgebra(space.basis).jacobi_residuals() == []


def test_principal_algebra_unrestricted(fin_spec):
    space = unrestricted_point_check(fin_spec, AnsatzSpec(2))
    assert space.dimension == 1


def test_diffusion_algebra(diffusion_spec):
    space = solve(determining_system(diffusion_spec), diffusion_spec, AnsatzSpec(3), probe=False)
    expected = fields(diffusion_spec.coordinates, {"t": "1"}, {"x": "1"}, {"t": "2*t", "x": "x"})
    assert space.dimension == 3
    assert spans(space, expected)
    assert LieAlgebra(space.basis).jacobi_residuals() == []


def test_equivalence_algebra_with_shape(equiv_spec):
    space = solve_spec(equiv_spec, AnsatzSpec(3), probe=False)
    expected = fields(equiv_spec.coordinates, {"t": "1"}, {"x": "1"}, {"t": "2*t", "x": "x", "h": "-2*h"},
                      {"u": "u"})
    assert space.dimension == 4
    assert spans(space, expected)
    algebra = LieAlgebra(space.basis)
    assert algebra.closed and algebra.jacobi_residuals() == []


def test_equivalence_algebra_without_shape(equiv_spec):
    wide = equiv_spec.with_unknown("phi", shape=ex.ONE, poly_vars=None, degree=None)
    space = solve_spec(wide, AnsatzSpec(3), probe=False)
    assert space.dimension == 5
    extra = fields(equiv_spec.coordinates, {"x": "x", "E": "2*E"})
    assert span_rank(space.basis + extra) == 5


def test_assignments_are_rational(fin_spec):
    space = solve_spec(fin_spec, AnsatzSpec(2), probe=False)
    assert all(isinstance(v, Fraction) for a in space.assignments for v in a.values())
