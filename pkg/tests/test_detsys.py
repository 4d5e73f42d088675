import pytest

from conftest import data_path
from lib.general import random_rational
from lib.load import load_problem
from symmetry import expr as ex
from symmetry.detsys import (determining_system, diff_fixture, generic_system, is_symmetry, normalize, on_shell,
                             split, symmetry_condition, verify)
from symmetry.jet import VectorField
from symmetry.parser import parse

sym = ex.symbol


def field(spec, **coeffs):
    return VectorField(spec.coordinates, {c: parse(str(v)) for c, v in coeffs.items()})


def test_symmetry_condition(fin_spec):
    assert symmetry_condition(field(fin_spec, t=1), fin_spec).is_zero
    assert symmetry_condition(VectorField(fin_spec.coordinates), fin_spec).is_zero
    h_x_u = ex.mul(ex.func("h", ("x",), ("x",)), sym("u"))
    condition = symmetry_condition(field(fin_spec, x=1), fin_spec)
    assert condition in (h_x_u, ex.neg(h_x_u))


def test_split_by_monomials():
    a, b, u_x = sym("a"), sym("b"), sym("u_x")
    system = split(ex.add(ex.mul(a, u_x), b), [u_x])
    assert set(system.exprs()) == {a, b}


def test_split_over_arbitrary_functions():
    e = ex.add(sym("chi_u"), ex.mul(sym("E_u"), sym("chi_E")), ex.neg(ex.mul(sym("h_x"), sym("xi2_u"))))
    system = split(e, (), arbitrary=[sym("E_u"), sym("h_x")])
    assert set(system.exprs()) == {sym("chi_u"), sym("chi_E"), sym("xi2_u")}


def test_normalize_keeps_first_power():
    E_u, xi1_x = sym("E_u"), sym("xi1_x")
    assert normalize(ex.mul(-2, ex.power(E_u, 2), xi1_x), [E_u]) == ex.mul(E_u, xi1_x)


def test_fin_system_keeps_printed_factors(fin_spec):
    system = determining_system(fin_spec)
    context = fin_spec.parse_context()
    for text in ("E_u*xi1_x", "E*xi1_x"):
        e = parse(text, context)
        assert system.contains(e, fin_spec.arbitrary_atoms(e))
    assert all(line.endswith(" = 0") for line in system.lines())


def test_verify(fin_spec):
    assert verify(field(fin_spec, t=1), fin_spec) == []
    assert is_symmetry(field(fin_spec, t=1), fin_spec)
    assert verify(field(fin_spec, x="x"), fin_spec)
    assert not is_symmetry(field(fin_spec, x=1), fin_spec)


def test_verify_equivalence_generators(equiv_spec):
    assert verify(field(equiv_spec, t=1), equiv_spec) == []
    assert verify(field(equiv_spec, t="2*t", x="x", h="-2*h"), equiv_spec) == []
    assert verify(field(equiv_spec, u="u"), equiv_spec) == []


def test_fixture_diff(fin_spec):
    fixture = load_problem(data_path("fin_determining.fix"), spec=fin_spec).system
    diff = diff_fixture(determining_system(fin_spec), fixture)
    assert [e.implied for e in diff.fixture_entries] == [True, True, False, False, False, False, True]
    assert [e.source for e in diff.unimplied_fixture] == [4, 5, 6, 7]
    assert not diff.matches


def test_on_shell(fin_spec):
    context = fin_spec.parse_context()
    e = parse("u_t - h*u", context)
    assert on_shell(e, fin_spec) == parse("E_u*u_x^2 + E*u_xx", context)


def rebuilt(system):
    return ex.add(*[ex.mul(c.monomial, c.expr) for c in system.constraints])


def test_split_rebuilds_input(fin_spec):
    E_u, h_x = sym("E_u"), sym("h_x")
    u_x, u_xx = sym("u_x"), sym("u_xx")
    e = ex.add(ex.mul(3, E_u, u_x, sym("xi1_x")), ex.mul(u_x, sym("eta_u")), ex.neg(ex.mul(h_x, u_xx, sym("xi2"))),
               ex.mul(ex.power(u_x, 2), E_u, sym("xi2_x")), ex.mul(h_x, u_x, sym("eta")), sym("eta_t"))
    assert rebuilt(split(e, [u_x, u_xx], normalized=False)) == e
    assert rebuilt(split(e, [u_x, u_xx], arbitrary=[E_u, h_x], normalized=False)) == e
    condition = symmetry_condition(fin_spec.generic_field(), fin_spec)
    assert rebuilt(split(condition, fin_spec.jet.jet_symbols, normalized=False)) == condition


def test_split_ignores_rational_scaling(fin_spec, rng):
    condition = symmetry_condition(fin_spec.generic_field(), fin_spec)
    arbitrary = sorted(fin_spec.arbitrary_atoms(condition), key=ex.sort_key)
    system = split(condition, fin_spec.jet.jet_symbols, arbitrary=arbitrary)
    for _ in range(3):
        k = random_rational(rng)
        scaled = split(ex.mul(k, condition), fin_spec.jet.jet_symbols, arbitrary=arbitrary)
        assert scaled.exprs() == system.exprs()


@pytest.mark.parametrize("spec_name, coeffs", [
    ("fin_spec", {}),
    ("fin_spec", {"t": 1}),
    ("fin_spec", {"x": 1}),
    ("fin_spec", {"t": "2*t", "x": "x"}),
    ("fin_spec", {"u": "u"}),
    ("fin_spec", {"t": "t", "u": "t*u"}),
    ("diffusion_spec", {"t": "2*t", "x": "x"}),
    ("diffusion_spec", {"x": 1}),
    ("diffusion_spec", {"u": "x*u"}),
])
def test_verify_agrees_with_symmetry_condition(request, spec_name, coeffs):
    spec = request.getfixturevalue(spec_name)
    v = field(spec, **coeffs)
    assert (verify(v, spec) == []) == symmetry_condition(v, spec).is_zero


def test_generic_system_lives_on_the_problem():
    spec = load_problem(data_path("fin.pde")).spec
    assert spec.generic_system is None
    system = generic_system(spec)
    assert spec.generic_system is system and generic_system(spec) is system
    assert system.stage == 1
    # a fresh problem builds its own
    assert generic_system(spec.unrestricted()) is not system
