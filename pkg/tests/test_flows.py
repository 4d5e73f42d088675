import pytest

from symmetry import expr as ex
from symmetry.errors import NonInvertibleError, UnsupportedFlowError
from symmetry.flows import (Implicit, Transformation, flow, named_reflection, pushforward_equation, scaling_family,
                            transport_solution)
from symmetry.jet import VectorField
from symmetry.parser import parse

COORDS = ("t", "x", "u", "E", "h")
s = ex.symbol("s")


def basis(g4, name):
    return g4.algebra.basis[g4.algebra.index(name)]


def as_symbol(e, name, args):
    return ex.substitute(e, ex.func(name, args), ex.symbol(name))


def test_translations(g4):
    assert flow(basis(g4, "Y1"))["t"] == parse("t + s")
    assert flow(basis(g4, "Y2"))["x"] == parse("x + s")


def test_scaling_flow(g4):
    T = flow(basis(g4, "Y3"))
    assert T["t"] == parse("t*exp(2*s)")
    assert T["x"] == parse("x*exp(s)")
    assert T["h"] == parse("h*exp(-2*s)")
    assert T["u"] == ex.symbol("u")


def test_conductivity_flow(g4):
    T = flow(basis(g4, "Y4"))
    assert T["E"] == parse("E*exp(exp(-u)*s)")


def test_implicit_component():
    v = VectorField(("t", "x"), {"x": parse("1 + x^2")})
    T = flow(v)
    assert isinstance(T["x"], Implicit)
    assert T.implicit == ["x"]
    with pytest.raises(UnsupportedFlowError):
        T.derivative_at_zero()


def test_coupled_coefficients_are_rejected():
    v = VectorField(("t", "x"), {"t": parse("x"), "x": parse("t")})
    with pytest.raises(UnsupportedFlowError):
        flow(v)


def test_group_law(g4):
    for name in g4.algebra.names:
        T = flow(basis(g4, name))
        assert T.at(0).is_identity
        assert T.then(T.inverse()).is_identity
        generator = T.derivative_at_zero()
        assert all(generator[c] == basis(g4, name)[c] for c in COORDS)
    T = flow(basis(g4, "Y3"))
    r = ex.symbol("r")
    twice = T.then(T.at(r))
    assert twice["t"] == T.at(ex.add(s, r))["t"]


def test_pushforward_of_scaling(fin_spec, g4):
    report = pushforward_equation(flow(basis(g4, "Y3")), fin_spec)
    assert report.fin_form
    assert report.consistent is True
    assert report.induced["h"] == ex.mul(ex.func("h", ("x",)), ex.exp(ex.mul(-2, s)))


def test_pushforward_of_conductivity_flow(fin_spec, g4):
    report = pushforward_equation(flow(basis(g4, "Y4")), fin_spec)
    assert report.fin_form
    assert report.consistent is False
    assert report.reasons


def test_scaling_family(fin_spec):
    report = pushforward_equation(scaling_family(), fin_spec)
    assert report.consistent is True
    E = as_symbol(report.induced["E"], "E", ("u",))
    h = as_symbol(report.induced["h"], "h", ("x",))
    assert E == parse("d3^2*d1^(-1)*E")
    assert h == parse("d1^(-1)*h")


@pytest.mark.parametrize("name, consistent", [
    ("reflect_t", True), ("reflect_x", True), ("reflect_u", True), ("reflect_E", False), ("reflect_h", False)])
def test_reflections(fin_spec, name, consistent):
    assert pushforward_equation(named_reflection(name), fin_spec).consistent is consistent


def test_unknown_reflection():
    with pytest.raises(NotImplementedError):
        named_reflection("reflect_s")


def test_shift_of_u_leaves_the_class(fin_spec):
    T = Transformation(COORDS, {"u": parse("u + 1")})
    with pytest.raises(UnsupportedFlowError):
        pushforward_equation(T, fin_spec)


def test_transported_solutions(g4):
    f = ex.func("f", ("t", "x"))
    moved = transport_solution(flow(basis(g4, "Y1")), f)
    assert moved.solution.args == [ex.add(ex.symbol("t"), s), ex.symbol("x")]
    moved = transport_solution(flow(basis(g4, "Y3")), f)
    assert str(moved) == "f(t*exp(2*s), x*exp(s))"
    assert moved.coefficients["h"] == parse("h*exp(2*s)")


def test_transport_needs_explicit_components():
    v = VectorField(("t", "x", "u"), {"x": parse("1 + x^2")})
    with pytest.raises(NonInvertibleError):
        transport_solution(flow(v), ex.func("f", ("t", "x")))


def test_flow_with_free_function():
    u = ex.symbol("u")
    Y = VectorField(COORDS, {"E": ex.mul(ex.exp(ex.neg(u)), ex.func("F", ("E",)))})
    T = flow(Y)
    assert T.implicit == ["E"]
    assert T["E"].integrand == ex.func("F", ("r",))
    assert T["E"].rhs == ex.mul(s, ex.exp(ex.neg(u)))
    assert str(T["E"]) == "int_E^E~ dr/F(r) = s*exp(-u)"
    assert all(T[c] == ex.symbol(c) for c in ("t", "x", "u", "h"))
