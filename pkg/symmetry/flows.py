"""One-parameter groups, discrete maps and their action on the fin equation."""
from fractions import Fraction

from symmetry import expr as ex
from symmetry.errors import NonInvertibleError, UnsupportedFlowError
from symmetry.jet import jet_name

DUMMY = "r"


def _rename(e, old, new):
    """Rename the symbol old to new, inside function atom arguments too."""
    mapping = {ex.symbol(old): ex.symbol(new)}
    for atom in e.atoms:
        if isinstance(atom, ex.FuncAtom) and old in atom.args:
            args = [new if a == old else a for a in atom.args]
            index = [new if a == old else a for a in atom.index]
            mapping[atom] = ex.func(atom.name, args, index)
    return ex.substitute_many(e, mapping)


class Implicit:
    """new coordinate defined by int_{coord}^{new} dr / p(r) = rhs."""

    def __init__(self, coord, integrand, rhs):
        self.coord = coord
        self.integrand = integrand
        self.rhs = rhs

    def substitute(self, mapping):
        return Implicit(self.coord, self.integrand, ex.substitute_many(self.rhs, mapping))

    def __eq__(self, other):
        return (isinstance(other, Implicit) and self.coord == other.coord
                and self.integrand == other.integrand and self.rhs == other.rhs)

    def __hash__(self):
        return hash((self.coord, self.integrand, self.rhs))

    def __str__(self):
        # function atoms print with their arguments: F(r), not F
        calls = {a: ex.symbol(f"{ex.to_string(a)}({','.join(a.args)})")
                 for a in self.integrand.atoms if isinstance(a, ex.FuncAtom)}
        p = ex.to_string(ex.substitute_many(self.integrand, calls))
        if isinstance(self.integrand, (ex.Sum, ex.Product)):
            p = f"({p})"
        return f"int_{self.coord}^{self.coord}~ d{DUMMY}/{p} = {ex.to_string(self.rhs)}"

    __repr__ = __str__


class Transformation:
    """Componentwise point map on an ordered coordinate list.

    Each component is an Expr in the old coordinates (and the parameter) or an
    Implicit integral relation.

    Args:
        coords: coordinate names
        components: coord -> Expr or Implicit, identity when missing
        parameter: Symbol of the group parameter, None for discrete maps
        generator: VectorField the map was integrated from
        kind: "flow", "map", "reflection" or "family"
    """

    def __init__(self, coords, components=None, parameter=None, generator=None, kind="map", name=""):
        self.coords = tuple(coords)
        components = components or {}
        self.components = {c: components.get(c, ex.symbol(c)) for c in self.coords}
        self.parameter = parameter
        self.generator = generator
        self.kind = kind
        self.name = name

    @classmethod
    def identity(cls, coords):
        return cls(coords, kind="map", name="identity")

    def __getitem__(self, coord):
        return self.components[coord]

    def __eq__(self, other):
        return isinstance(other, Transformation) and self.coords == other.coords and all(
            self.components[c] == other.components[c] for c in self.coords)

    def __hash__(self):
        return hash(self.coords)

    @property
    def is_identity(self):
        return all(self.components[c] == ex.symbol(c) for c in self.coords)

    @property
    def implicit(self):
        return [c for c in self.coords if isinstance(self.components[c], Implicit)]

    def at(self, value):
        """The map at a concrete (or symbolic) parameter value."""
        if self.parameter is None:
            return self
        mapping = {self.parameter: ex.as_expr(value)}
        components = {}
        for c, v in self.components.items():
            components[c] = v.substitute(mapping) if isinstance(v, Implicit) else ex.substitute_many(v, mapping)
        parameter = self.parameter if self.parameter in mapping[self.parameter].atoms else None
        return Transformation(self.coords, components, parameter, self.generator, self.kind, self.name)

    def derivative_at_zero(self):
        """d/ds of every explicit component at s = 0; the generating field's coefficients."""
        if self.parameter is None:
            raise UnsupportedFlowError("a discrete map has no generator")
        out = {}
        for c, v in self.components.items():
            if isinstance(v, Implicit):
                raise UnsupportedFlowError(f"{c} is given implicitly")
            out[c] = ex.substitute(ex.differentiate(v, self.parameter), self.parameter, ex.ZERO)
        return out

    def then(self, other):
        """Apply self first, then other."""
        if self.coords != other.coords:
            raise UnsupportedFlowError("maps act on different coordinates")
        if self.implicit or other.implicit:
            raise UnsupportedFlowError("implicit components cannot be composed")
        mapping = {ex.symbol(c): self.components[c] for c in self.coords}
        components = {c: ex.substitute_many(other.components[c], mapping) for c in self.coords}
        return Transformation(self.coords, components, None, None, "map", f"{self.name}*{other.name}")

    def inverse(self):
        if self.kind == "flow" and self.parameter is not None:
            return self.at(ex.neg(self.parameter))
        components = {}
        for c, v in self.components.items():
            if isinstance(v, Implicit):
                raise NonInvertibleError(f"{c} is given implicitly")
            sym = ex.symbol(c)
            a = ex.differentiate(v, c)
            b = ex.sub(v, ex.mul(a, sym))
            if a.is_zero:
                raise NonInvertibleError(f"{c} -> {v} is not invertible")
            if c in a.free_symbols or c in b.free_symbols:
                raise NonInvertibleError(f"{c} -> {v} is not affine in {c}")
            for other in self.coords:
                if other != c and (other in a.free_symbols or other in b.free_symbols):
                    raise NonInvertibleError(f"{c} -> {v} depends on {other}")
            components[c] = ex.div(ex.sub(sym, b), a)
        return Transformation(self.coords, components, self.parameter, self.generator, self.kind,
                              f"{self.name}^-1")

    def component_str(self, coord):
        v = self.components[coord]
        return str(v) if isinstance(v, Implicit) else ex.to_string(v)

    def __str__(self):
        old = ", ".join(self.coords)
        new = ", ".join(self.component_str(c) for c in self.coords)
        return f"({old}) -> ({new})"

    __repr__ = __str__


def _flow_component(coord, g, s, moving):
    c = ex.symbol(coord)
    if g.is_zero:
        return c
    others = (g.free_symbols & moving) - {coord}
    if others:
        raise UnsupportedFlowError(
            f"coefficient {g} of d/d{coord} depends on the moving coordinates {', '.join(sorted(others))}")
    if coord not in g.free_symbols:
        return ex.add(c, ex.mul(g, s))

    coeff, factors = ex.factors_of(g)
    own = [f for f in factors if coord in f.free_symbols]
    rest = ex.mul(coeff, *[f for f in factors if coord not in f.free_symbols])
    if len(own) == 1:
        f = own[0]
        if f == c:
            return ex.mul(c, ex.exp(ex.mul(rest, s)))
        if isinstance(f, ex.Power) and f.base == c:
            k = f.exp
            return ex.power(ex.add(ex.power(c, 1 - k), ex.mul(1 - k, rest, s)), Fraction(1) / (1 - k))
        if isinstance(f, ex.Exp):
            grouped = ex.collect(f.arg, [c])
            a = grouped.get(c)
            if set(grouped) <= {c, ex.ONE} and isinstance(a, ex.Const):
                m = ex.mul(rest, ex.exp(grouped.get(ex.ONE, ex.ZERO)))
                inner = ex.sub(ex.exp(ex.mul(-a.value, c)), ex.mul(a.value, m, s))
                return ex.mul(Fraction(-1) / a.value, ex.log(inner))
    integrand = _rename(ex.mul(*own), coord, DUMMY)
    return Implicit(coord, integrand, ex.mul(rest, s))


def flow(v, s="s"):
    """One-parameter group generated by v.

    Coefficients that vanish freeze their coordinate. Every other coefficient
    may depend on its own coordinate and on frozen ones only; translations,
    scalings, monomials c*w^k and exponentials c*exp(a*w) get closed forms,
    anything else separable an implicit integral relation.
    """
    s = ex.symbol(s) if isinstance(s, str) else s
    moving = {c for c in v.coords if not v[c].is_zero}
    components = {c: _flow_component(c, v[c], s, moving) for c in v.coords}
    return Transformation(v.coords, components, s, v, "flow", f"exp({s}*X)")


def scaling_family(coords=("t", "x", "u", "E", "h"), names=("d1", "d2", "d3", "d4", "d5")):
    """t~ = d1*t + d2, x~ = d3*x + d4, u~ = d5*u with E~ = d3^2/d1*E and h~ = h/d1."""
    d1, d2, d3, d4, d5 = [ex.symbol(n) for n in names]
    components = {
        "t": ex.add(ex.mul(d1, ex.symbol("t")), d2),
        "x": ex.add(ex.mul(d3, ex.symbol("x")), d4),
        "u": ex.mul(d5, ex.symbol("u")),
    }
    if "E" in coords:
        components["E"] = ex.mul(ex.power(d3, 2), ex.power(d1, -1), ex.symbol("E"))
    if "h" in coords:
        components["h"] = ex.mul(ex.power(d1, -1), ex.symbol("h"))
    return Transformation(coords, components, None, None, "family", "scaling")


def reflection(coords, flipped, name):
    return Transformation(coords, {c: ex.neg(ex.symbol(c)) for c in flipped}, None, None, "reflection", name)


REFLECTIONS = {
    "reflect_t": ("t", "E", "h"),
    "reflect_x": ("x",),
    "reflect_u": ("u",),
    "reflect_E": ("E",),
    "reflect_h": ("h",),
}


def named_reflection(name, coords=("t", "x", "u", "E", "h")):
    if name not in REFLECTIONS:
        raise NotImplementedError(f"unknown reflection {name}")
    return reflection(coords, [c for c in REFLECTIONS[name] if c in coords], name)


class PushforwardReport:
    """Outcome of rewriting the equation in the new coordinates.

    equation:   the transformed equation, in the new jet symbols
    fin_form:   True when it is again u_t = (E~ u_x)_x + h~ u
    induced:    {'E': E~, 'h': h~} in the old variables
    consistent: True/False when the map carries its own E and h components,
                None otherwise
    reasons:    why the form or the consistency check failed
    """

    def __init__(self, equation, fin_form, induced, consistent, reasons):
        self.equation = equation
        self.fin_form = fin_form
        self.induced = induced
        self.consistent = consistent
        self.reasons = reasons


def _affine_factor(T, coord, base):
    """(a, b) for the component coord -> a*coord + b with a, b free of base."""
    comp = T[coord]
    if isinstance(comp, Implicit):
        raise UnsupportedFlowError(f"{coord} is given implicitly")
    a = ex.differentiate(comp, coord)
    if a.is_zero:
        raise NonInvertibleError(f"{coord} -> {ex.to_string(comp)} is not invertible")
    offset = ex.sub(comp, ex.mul(a, ex.symbol(coord)))
    if (a.free_symbols | offset.free_symbols) & set(base):
        raise UnsupportedFlowError(f"{coord} -> {ex.to_string(comp)} is not affine in {coord} alone")
    return a, offset


def pushforward_equation(T, spec, new="U"):
    """Rewrite the fin equation of spec under T by the chain rule.

    T must be affine in t, x and linear in u: t~ = a*t + b, x~ = c*x + d,
    u~ = k*u. The result is solved for the new u_t and compared with the
    fin form, giving the induced E~ = c^2/a*E and h~ = h/a.
    """
    t, x = spec.jet.independents
    u = spec.jet.dependent
    base = (t, x, u)
    a_t, _ = _affine_factor(T, t, base)
    a_x, _ = _affine_factor(T, x, base)
    a_u, offset = _affine_factor(T, u, base)
    if not offset.is_zero:
        raise UnsupportedFlowError(f"{u} -> {ex.to_string(T[u])} shifts {u}; the reaction term leaves the class")

    factors = {t: a_t, x: a_x}
    mapping = {ex.symbol(u): ex.div(ex.symbol(new), a_u)}
    for name, index in spec.jet.jet_index.items():
        scale = ex.mul(*[factors[i] for i in index])
        mapping[ex.symbol(name)] = ex.mul(scale, ex.div(ex.symbol(jet_name(new, index)), a_u))
    delta = ex.substitute_many(spec.delta, mapping)

    lead = ex.symbol(jet_name(new, (t,)))
    grouped = ex.collect(delta, [lead])
    k = grouped.get(lead, ex.ZERO)
    if k.is_zero:
        raise NonInvertibleError("the new equation has no time derivative")
    rhs = ex.div(ex.neg(grouped.get(ex.ONE, ex.ZERO)), k)
    equation = f"{ex.to_string(lead)} = {ex.to_string(rhs)}"

    new_u = ex.symbol(new)
    u_x = ex.symbol(jet_name(new, (x,)))
    u_xx = ex.symbol(jet_name(new, (x, x)))
    new_jet = [ex.symbol(jet_name(new, index)) for index in spec.jet.jet_index.values()]
    terms = ex.collect(rhs, new_jet + [new_u])
    form = []
    extra = [m for m in terms if m not in {u_xx, ex.power(u_x, 2), new_u}]
    if extra:
        form.append("unexpected terms: " + ", ".join(ex.to_string(ex.mul(m, terms[m])) for m in extra))
    E_new = terms.get(u_xx, ex.ZERO)
    h_new = terms.get(new_u, ex.ZERO)
    if E_new.free_symbols & {t, x}:
        form.append(f"E~ = {ex.to_string(E_new)} depends on {t} or {x}")
    if h_new.free_symbols & {t, u}:
        form.append(f"h~ = {ex.to_string(h_new)} depends on {t} or {u}")
    if terms.get(ex.power(u_x, 2), ex.ZERO) != ex.div(ex.differentiate(E_new, u), a_u):
        form.append(f"the {u}_x^2 coefficient is not d/d{u} of the {u}_xx coefficient")

    conductivity, reaction = tuple(spec.jet.arbitrary)[:2]
    induced = {conductivity: E_new, reaction: h_new}
    consistent = None
    mismatch = []
    carried = [name for name in induced if name in T.coords]
    if carried and not any(isinstance(T[name], Implicit) for name in carried):
        as_symbols = {}
        for e in induced.values():
            for atom in e.atoms:
                if isinstance(atom, ex.FuncAtom) and atom.name in induced and not atom.index:
                    as_symbols[atom] = ex.symbol(atom.name)
        for name in carried:
            got = ex.substitute_many(induced[name], as_symbols)
            if got != T[name]:
                mismatch.append(f"{name}~ induced {ex.to_string(got)}, map gives {ex.to_string(T[name])}")
        consistent = not mismatch
    return PushforwardReport(equation, not form, induced, consistent, form + mismatch)


class Composite:
    """An undetermined function evaluated at expressions, times a scale: scale*f(a1, a2)."""

    def __init__(self, name, args, scale=ex.ONE):
        self.name = name
        self.args = list(args)
        self.scale = scale

    def __eq__(self, other):
        return (isinstance(other, Composite) and self.name == other.name
                and self.args == other.args and self.scale == other.scale)

    def __hash__(self):
        return hash((self.name, tuple(self.args)))

    def __str__(self):
        body = f"{self.name}({', '.join(ex.to_string(a) for a in self.args)})"
        if self.scale == ex.ONE:
            return body
        return f"{ex.to_string(self.scale)}*{body}"

    __repr__ = __str__


class TransportedSolution:
    def __init__(self, solution, coefficients):
        self.solution = solution
        self.coefficients = coefficients

    def __str__(self):
        return str(self.solution) if isinstance(self.solution, Composite) else ex.to_string(self.solution)


def transport_solution(T, f, independents=("t", "x"), dependent="u"):
    """New solution from u = f(t, x): U^-1(f(T(t), X(x))).

    The arguments take the forward map, so translation by s gives f(t + s, x).
    The new solution belongs to the equation whose coefficients are the E and h
    components of the inverse map.
    """
    for c in independents + (dependent,):
        if isinstance(T[c], Implicit):
            raise NonInvertibleError(f"{c} is given implicitly")
        if c in independents and (T[c].free_symbols & {dependent}):
            raise NonInvertibleError(f"{c} -> {T[c]} depends on {dependent}")
    inverse = T.inverse()
    u_inv = inverse[dependent]
    args = [T[c] for c in independents]
    if isinstance(f, ex.FuncAtom) and not f.index and f.args == tuple(independents):
        scale = ex.differentiate(u_inv, dependent)
        if ex.sub(u_inv, ex.mul(scale, ex.symbol(dependent))) != ex.ZERO:
            raise NonInvertibleError(f"{dependent} -> {T[dependent]} is not linear")
        solution = Composite(f.name, args, scale)
    else:
        value = ex.substitute_many(f, {ex.symbol(c): a for c, a in zip(independents, args)})
        solution = ex.substitute(u_inv, ex.symbol(dependent), value)
    coefficients = {c: inverse[c] for c in T.coords if c not in independents + (dependent,)}
    return TransportedSolution(solution, coefficients)
