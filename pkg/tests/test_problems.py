import pytest

from conftest import data_path
from lib.load import load_config, load_problem
from problems.algebra_problem import AlgebraProblem
from problems.pde_problem import PDEProblem
from symmetry import expr as ex
from symmetry.errors import ParseError, SpecError
from symmetry.parser import parse

FIN = """\
name fin
independent t x
dependent u
arbitrary E(u) h(x)
equation u_t = Dx(E*u_x) + h*u
ansatz xi1(t,x) xi2(t,x) eta(t,x,u)
"""


def test_fin_problem(fin_spec):
    assert fin_spec.mode == "base"
    assert fin_spec.coordinates == ("t", "x", "u")
    assert fin_spec.leading == ex.symbol("u_t")
    assert fin_spec.solved == parse("E_u*u_x^2 + E*u_xx + h*u", fin_spec.parse_context())
    assert [u.name for u in fin_spec.unknowns] == ["xi1", "xi2", "eta"]


def test_equivalence_problem(equiv_spec):
    assert equiv_spec.mode == "equivalence"
    assert equiv_spec.coordinates == ("t", "x", "u", "E", "h")
    phi = [u for u in equiv_spec.unknowns if u.name == "phi"][0]
    assert phi.shape == ex.exp(ex.neg(ex.symbol("u")))
    assert phi.poly_vars == ("E",)
    assert phi.degree == 2


def test_specialize(fin_spec, diffusion_spec):
    assert "h" not in diffusion_spec.jet.arbitrary
    assert diffusion_spec.solved == parse("E_u*u_x^2 + E*u_xx", diffusion_spec.parse_context())
    with pytest.raises(SpecError):
        fin_spec.specialize("E", ex.const(1))
    with pytest.raises(SpecError):
        fin_spec.specialize("h", ex.symbol("t"))
    shifted = fin_spec.specialize("h", ex.symbol("c"), parameters=("c",))
    assert "c" in shifted.parameters


def test_unrestricted(fin_spec):
    wide = fin_spec.unrestricted()
    assert [u.args for u in wide.unknowns] == [("t", "x", "u")] * 3


def test_problem_from_text():
    spec = PDEProblem(text=FIN).spec
    assert spec.name == "fin"
    assert spec.equation_str().startswith("u_t = ")


def test_unknown_keyword_position():
    with pytest.raises(ParseError) as info:
        PDEProblem(text=FIN + "solve now\n")
    assert info.value.line == 7


def test_bad_equation_position():
    with pytest.raises(ParseError) as info:
        PDEProblem(text=FIN.replace("h*u", "h*u +"))
    assert info.value.line == 5


def test_ansatz_must_cover_coordinates():
    with pytest.raises(ParseError):
        PDEProblem(text=FIN.replace(" eta(t,x,u)", ""))


def test_algebra_problem(g4):
    assert g4.algebra.names == ["Y1", "Y2", "Y3", "Y4"]
    assert g4.coords == ("t", "x", "u", "E", "h")
    assert [name for name, _ in g4.representatives] == ["A1", "A2", "A3", "A4", "A5", "A6"]
    fields = dict(g4.representative_fields())
    assert fields["A5"]["t"] == ex.symbol("alpha")
    assert g4.fields["Z4w"]["x"] == ex.neg(ex.symbol("x"))


def test_dependent_basis_is_rejected():
    text = "coordinates t x\nbasis Y1 t = 1\nbasis Y2 t = 2\n"
    with pytest.raises(ParseError):
        AlgebraProblem(text=text)


def test_unknown_coordinate_in_field():
    with pytest.raises(ParseError) as info:
        AlgebraProblem(text="coordinates t x\nbasis Y1 s = 1\n")
    assert info.value.line == 2


def test_fixture_notes(equiv_spec):
    fixture = load_problem(data_path("equiv_determining.fix"), spec=equiv_spec)
    assert len(fixture.system) == 10
    assert len(fixture.system.notes) == 2


def test_load_dispatch():
    with pytest.raises(NotImplementedError):
        load_problem("data/config.yaml")
    with pytest.raises(FileNotFoundError):
        load_problem("data/missing.pde")


def test_config_defaults():
    config = load_config(data_path("config.yaml"))
    assert config["solver"]["degree"] == 3
    assert config["check"]["seed"] == 42
    assert config["search"]["max_length"] == 3
