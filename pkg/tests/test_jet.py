import pytest

from lib.general import random_rational
from symmetry import expr as ex
from symmetry.algebra import bracket
from symmetry.errors import ModeError, ProlongationError, SpaceMismatchError
from symmetry.jet import (JetContext, VectorField, apply_field, prolong, prolong_equivalence,
                          restricted_total_derivative, total_derivative)

t, x, u = ex.symbol("t"), ex.symbol("x"), ex.symbol("u")
BASE = ("t", "x", "u")


@pytest.fixture
def ctx():
    return JetContext(arbitrary={"E": ("u",), "h": ("x",)})


def test_coordinates(ctx):
    assert ctx.coordinates == BASE
    assert "u_tx" in ctx.jet_names
    wide = JetContext(arbitrary={"E": ("u",), "h": ("x",)}, equivalence=True)
    assert wide.coordinates == ("t", "x", "u", "E", "h")
    assert set(wide.constrained) == {"E_t", "E_x", "h_t", "h_u"}


def test_total_derivative(ctx):
    assert total_derivative(u, "x", ctx) == ex.symbol("u_x")
    assert total_derivative(ex.mul(t, u), "t", ctx) == ex.add(u, ex.mul(t, ex.symbol("u_t")))
    with pytest.raises(ModeError):
        total_derivative(u, "u", ctx)


def test_restricted_total_derivative():
    wide = JetContext(arbitrary={"E": ("u",), "h": ("x",)}, equivalence=True)
    E, h = ex.symbol("E"), ex.symbol("h")
    assert restricted_total_derivative(ex.mul(E, h), "x", wide) == ex.mul(E, ex.symbol("h_x"))
    assert restricted_total_derivative(ex.mul(E, h), "u", wide) == ex.mul(h, ex.symbol("E_u"))
    assert restricted_total_derivative(ex.mul(E, h), "t", wide).is_zero


def test_translation_prolongs_to_zero(ctx):
    pv = prolong(VectorField(BASE, {"x": 1}), ctx)
    assert all(c.is_zero for c in pv.prolongation.values())


def test_scaling_prolongation(ctx):
    v = VectorField(BASE, {"t": ex.mul(2, t), "x": x})
    pv = prolong(v, ctx)
    assert pv["u_t"] == ex.mul(-2, ex.symbol("u_t"))
    assert pv["u_x"] == ex.neg(ex.symbol("u_x"))
    assert pv["u_xx"] == ex.mul(-2, ex.symbol("u_xx"))
    with pytest.raises(ProlongationError):
        prolong(pv, ctx)


def test_vector_field_algebra():
    d_t = VectorField(BASE, {"t": 1})
    scaling = VectorField(BASE, {"t": ex.mul(2, t), "x": x})
    assert bracket(d_t, scaling) == d_t.scale(2)
    assert str(scaling) == "2*t*d/dt + x*d/dx"
    assert (scaling - scaling).is_zero
    assert scaling.support() == ["t", "x"]
    assert apply_field(scaling, ex.mul(t, x)) == ex.mul(3, t, x)
    with pytest.raises(SpaceMismatchError):
        scaling.restrict(("t", "E"))
    with pytest.raises(SpaceMismatchError):
        VectorField(BASE, {"E": 1})


def test_total_derivatives_commute(ctx):
    E, h = ctx.function("E"), ctx.function("h")
    samples = [ex.mul(t, x, ex.power(u, 2)),
               ex.add(ex.mul(E, u), ex.mul(h, ex.exp(x)), ex.mul(t, ex.power(u, 3), h)),
               ex.mul(ex.func("E", ("u",), ("u",)), ex.exp(ex.mul(t, u)), x)]
    for e in samples:
        assert total_derivative(total_derivative(e, "x", ctx), "t", ctx) == \
            total_derivative(total_derivative(e, "t", ctx), "x", ctx)


def test_prolongation_is_linear(ctx, rng):
    V = VectorField(BASE, {"t": ex.mul(t, x), "x": ex.add(ex.power(x, 2), u), "u": ex.mul(t, ex.power(u, 2))})
    W = VectorField(BASE, {"t": x, "x": ex.mul(t, u), "u": ex.mul(ex.exp(x), u)})
    pv, pw = prolong(V, ctx), prolong(W, ctx)
    for _ in range(3):
        a, b = random_rational(rng, high=9, max_den=5), random_rational(rng, high=9, max_den=5)
        combined = prolong(V.scale(a) + W.scale(b), ctx)
        assert set(combined.prolongation) == set(pv.prolongation)
        for name, value in combined.prolongation.items():
            assert value == ex.add(ex.mul(a, pv[name]), ex.mul(b, pw[name]))


def test_equivalence_prolongation_drops_constrained_terms(ctx):
    wide = JetContext(arbitrary={"E": ("u",), "h": ("x",)}, equivalence=True)
    E, h = ex.symbol("E"), ex.symbol("h")
    v = VectorField(wide.coordinates, {
        "t": ex.add(t, ex.mul(x, u)),
        "x": ex.mul(t, x),
        "u": ex.add(ex.mul(u, x), ex.power(t, 2)),
        "E": ex.add(ex.mul(E, ex.power(u, 2)), u),
        "h": ex.add(ex.mul(h, x), ex.mul(ex.power(x, 2), E)),
    })
    pv = prolong_equivalence(v, wide)
    zero = {ex.symbol(name): ex.ZERO for name in wide.constrained}
    for name in ("E", "h"):
        for a in BASE:
            full = restricted_total_derivative(v[name], a, wide)
            for b in BASE:
                full = ex.sub(full, ex.mul(ex.symbol(f"{name}_{b}"), restricted_total_derivative(v[b], a, wide)))
            assert pv[f"{name}_{a}"] == ex.substitute_many(full, zero)
    base = prolong(v.restrict(BASE), ctx)
    assert all(pv[k] == c for k, c in base.prolongation.items())
