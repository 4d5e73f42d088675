"""Jet space bookkeeping, vector fields and prolongation."""
from itertools import combinations_with_replacement

from symmetry import expr as ex
from symmetry.errors import (DependencyError, ModeError, OrderOverflowError, ProlongationError,
                             SpaceMismatchError)


def jet_name(dependent, index):
    return f"{dependent}_{''.join(index)}" if index else dependent


class JetContext:
    """Coordinates of the second order jet space of one dependent variable.

    In equivalence mode the arbitrary functions become differential variables:
    plain symbols E, E_u, h_x, ... with derivatives along the base variables
    outside their argument list constrained to zero.
    """

    def __init__(self, independents=("t", "x"), dependent="u", order=2, arbitrary=None, equivalence=False):
        assert order >= 1
        self.independents = tuple(independents)
        self.dependent = dependent
        self.order = order
        self.arbitrary = dict(arbitrary or {})
        self.equivalence = equivalence
        self.base = self.independents + (dependent,)

        self.jet_index = {}
        for k in range(1, order + 1):
            for index in combinations_with_replacement(self.independents, k):
                self.jet_index[jet_name(dependent, index)] = index
        self.jet_names = tuple(self.jet_index)
        self.jet_symbols = tuple(ex.symbol(n) for n in self.jet_names)

        self.variable_index = {}
        if equivalence:
            for name, args in self.arbitrary.items():
                for bad in args:
                    if bad not in self.base:
                        raise DependencyError(f"{name} depends on {bad}, which is not a base variable")
                for k in range(0, order + 1):
                    for index in combinations_with_replacement(args, k):
                        self.variable_index[jet_name(name, index)] = (name, index)

    @property
    def coordinates(self):
        """Coordinates a point vector field acts on."""
        if self.equivalence:
            return self.base + tuple(self.arbitrary)
        return self.base

    @property
    def constrained(self):
        """First order derivatives of differential variables fixed to zero (E_t, E_x, h_t, h_u)."""
        if not self.equivalence:
            return ()
        return tuple(jet_name(name, (b,)) for name, args in self.arbitrary.items()
                     for b in self.base if b not in args)

    def arbitrary_atoms(self, e):
        """Atoms of e that stand for arbitrary functions or their derivatives."""
        if self.equivalence:
            return {a for a in e.atoms if isinstance(a, ex.Symbol) and a.name in self.variable_index
                    and self.variable_index[a.name][1]}
        return {a for a in e.atoms if isinstance(a, ex.FuncAtom) and a.name in self.arbitrary}

    def function(self, name, index=()):
        """Node for an arbitrary function or one of its derivatives."""
        args = self.arbitrary[name]
        if self.equivalence:
            return ex.symbol(jet_name(name, tuple(sorted(index, key=args.index))))
        return ex.func(name, args, index)

    def jet(self, index):
        if not index:
            return ex.symbol(self.dependent)
        index = tuple(sorted(index, key=self.independents.index))
        if len(index) > self.order:
            raise OrderOverflowError(f"{jet_name(self.dependent, index)} exceeds order {self.order}")
        return ex.symbol(jet_name(self.dependent, index))

    def parse_context(self, parameters=(), functions=None, lenient=False):
        from symmetry.parser import ParseContext
        declared = dict(functions or {})
        if not self.equivalence:
            declared.update(self.arbitrary)
        return ParseContext(
            symbols=tuple(self.independents) + tuple(parameters),
            functions=declared,
            variables=self.arbitrary if self.equivalence else None,
            base=self.base,
            jet=((self.dependent,), self.independents),
            order=self.order,
            total=lambda e, wrt: total_derivative(e, wrt, self),
            lenient=lenient,
        )


def _variable_total(ctx, name, index, wrt):
    """D_wrt of the differential variable name_index (equivalence mode)."""
    args = ctx.arbitrary[name]
    if len(index) + 1 > ctx.order:
        raise OrderOverflowError(f"D_{wrt} of {jet_name(name, index)} exceeds order {ctx.order}")
    terms = []
    for a in args:
        promoted = ctx.function(name, index + (a,))
        if a == wrt:
            terms.append(promoted)
        elif a == ctx.dependent:
            terms.append(ex.mul(promoted, ctx.jet((wrt,))))
    return ex.add(*terms)


def total_derivative(e, wrt, ctx):
    """D_wrt e on the jet space of ctx.

    Raises OrderOverflowError when a term would leave the declared order.
    """
    if wrt not in ctx.independents:
        raise ModeError(f"{wrt} is not an independent variable")
    e = ex.as_expr(e)
    names = e.free_symbols
    terms = [ex.differentiate(e, wrt)]
    if ctx.dependent in names:
        terms.append(ex.mul(ctx.jet((wrt,)), ex.differentiate(e, ctx.dependent)))
    for name, index in ctx.jet_index.items():
        if name not in names:
            continue
        partial = ex.differentiate(e, name)
        if partial.is_zero:
            continue
        terms.append(ex.mul(ctx.jet(index + (wrt,)), partial))
    if ctx.equivalence:
        for name, (var, index) in ctx.variable_index.items():
            if name not in names:
                continue
            partial = ex.differentiate(e, name)
            if partial.is_zero:
                continue
            terms.append(ex.mul(_variable_total(ctx, var, index, wrt), partial))
    return ex.add(*terms)


def restricted_total_derivative(e, wrt, ctx):
    """D~_wrt on the space (t, x, u) with the arbitrary functions as differential variables.

    D~_t = d_t, D~_x = d_x + h_x d_h, D~_u = d_u + E_u d_E for the fin class.
    """
    if not ctx.equivalence:
        raise ModeError("restricted total derivatives need an equivalence context")
    if wrt not in ctx.base:
        raise ModeError(f"{wrt} is not a base variable")
    e = ex.as_expr(e)
    names = e.free_symbols
    terms = [ex.differentiate(e, wrt)]
    for name, (var, index) in ctx.variable_index.items():
        if name not in names or wrt not in ctx.arbitrary[var]:
            continue
        partial = ex.differentiate(e, name)
        if partial.is_zero:
            continue
        if len(index) + 1 > ctx.order:
            raise OrderOverflowError(f"D~_{wrt} of {name} exceeds order {ctx.order}")
        terms.append(ex.mul(ctx.function(var, index + (wrt,)), partial))
    return ex.add(*terms)


def _coefficient_str(c):
    text = ex.to_string(c)
    if isinstance(c, ex.Sum):
        return f"({text})"
    return text


class VectorField:
    """sum_c coeff[c] * d/dc over an ordered coordinate list.

    `prolongation` holds the coefficients of derivative coordinates once the
    field has been prolonged (u_t, u_xx, E_u, ... keyed by coordinate name).
    """

    def __init__(self, coords, coeffs=None, prolongation=None):
        self.coords = tuple(coords)
        coeffs = coeffs or {}
        for c in coeffs:
            if c not in self.coords:
                raise SpaceMismatchError(f"{c} is not a coordinate of ({', '.join(self.coords)})")
        self.coeffs = {c: ex.as_expr(coeffs.get(c, ex.ZERO)) for c in self.coords}
        self.prolongation = dict(prolongation) if prolongation is not None else None

    @property
    def prolonged(self):
        return self.prolongation is not None

    def __getitem__(self, coord):
        if coord in self.coeffs:
            return self.coeffs[coord]
        if self.prolongation and coord in self.prolongation:
            return self.prolongation[coord]
        return ex.ZERO

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.coords == other.coords and all(self.coeffs[c] == other.coeffs[c] for c in self.coords)

    def __hash__(self):
        return hash((self.coords, tuple(self.coeffs[c] for c in self.coords)))

    def _check(self, other):
        if self.coords != other.coords:
            raise SpaceMismatchError(f"({', '.join(self.coords)}) vs ({', '.join(other.coords)})")

    def __add__(self, other):
        self._check(other)
        return VectorField(self.coords, {c: ex.add(self.coeffs[c], other.coeffs[c]) for c in self.coords})

    def __sub__(self, other):
        self._check(other)
        return VectorField(self.coords, {c: ex.sub(self.coeffs[c], other.coeffs[c]) for c in self.coords})

    def scale(self, k):
        return VectorField(self.coords, {c: ex.mul(k, v) for c, v in self.coeffs.items()})

    def map(self, fn):
        return VectorField(self.coords, {c: fn(v) for c, v in self.coeffs.items()})

    @property
    def is_zero(self):
        return all(v.is_zero for v in self.coeffs.values())

    def support(self):
        return [c for c in self.coords if not self.coeffs[c].is_zero]

    def restrict(self, coords):
        for c in coords:
            if c not in self.coords:
                raise SpaceMismatchError(f"{c} is not a coordinate of ({', '.join(self.coords)})")
        return VectorField(coords, {c: self.coeffs[c] for c in coords})

    def __str__(self):
        parts = []
        for c in self.support():
            coeff = self.coeffs[c]
            if coeff == ex.ONE:
                parts.append(f"d/d{c}")
            elif coeff == ex.MINUS_ONE:
                parts.append(f"-d/d{c}")
            else:
                parts.append(f"{_coefficient_str(coeff)}*d/d{c}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"VectorField({self})"


def apply_field(v, e):
    """v acting on e as a derivation; prolonged coordinates included."""
    e = ex.as_expr(e)
    names = e.free_symbols
    terms = []
    for coord, coeff in list(v.coeffs.items()) + list((v.prolongation or {}).items()):
        if coeff.is_zero or coord not in names:
            continue
        terms.append(ex.mul(coeff, ex.differentiate(e, coord)))
    return ex.add(*terms)


def prolong(v, ctx):
    """Second order prolongation with eta^{J,i} = D_i eta^J - sum_k u_{J,k} D_i xi^k."""
    if v.prolonged:
        raise ProlongationError("field is already prolonged")
    if tuple(v.coords[:len(ctx.base)]) != ctx.base:
        raise ProlongationError(f"field coordinates ({', '.join(v.coords)}) do not start with ({', '.join(ctx.base)})")
    xi = {i: v[i] for i in ctx.independents}
    eta = {(): v[ctx.dependent]}
    for k in range(1, ctx.order + 1):
        for index in combinations_with_replacement(ctx.independents, k):
            head, i = index[:-1], index[-1]
            if head not in eta:
                head = tuple(sorted(head, key=ctx.independents.index))
            value = total_derivative(eta[head], i, ctx)
            for j in ctx.independents:
                if xi[j].is_zero:
                    continue
                value = ex.sub(value, ex.mul(ctx.jet(head + (j,)), total_derivative(xi[j], i, ctx)))
            eta[index] = value
    prolongation = {jet_name(ctx.dependent, index): value for index, value in eta.items() if index}
    return VectorField(v.coords, v.coeffs, prolongation)


def _check_dependencies(v, ctx, allowed):
    watched = set(ctx.coordinates) | set(ctx.variable_index)
    for coord, args in allowed.items():
        stray = (v[coord].free_symbols & watched) - set(args)
        if stray:
            raise DependencyError(f"coefficient of d/d{coord} depends on {', '.join(sorted(stray))}")


def prolong_equivalence(v, ctx, allowed=None):
    """Prolongation on the extended space (t, x, u, E, h).

    Adds the jet coefficients and, for each differential variable V with
    coefficient phi_V, the first order coefficients
    V^a = D~_a(phi_V) - sum_{b in args(V)} V_b D~_a(xi^b) for every base variable a.
    Coefficients along constrained derivatives (E_t, E_x, h_t, h_u) are the
    auxiliary conditions.
    """
    if not ctx.equivalence:
        raise ModeError("equivalence prolongation needs an equivalence context")
    if allowed:
        _check_dependencies(v, ctx, allowed)
    base = prolong(v.restrict(ctx.base), ctx)
    prolongation = dict(base.prolongation)
    for name, args in ctx.arbitrary.items():
        phi = v[name]
        for a in ctx.base:
            value = restricted_total_derivative(phi, a, ctx)
            for b in args:
                shift = restricted_total_derivative(v[b], a, ctx)
                if not shift.is_zero:
                    value = ex.sub(value, ex.mul(ctx.function(name, (b,)), shift))
            prolongation[jet_name(name, (a,))] = value
    return VectorField(v.coords, v.coeffs, prolongation)
