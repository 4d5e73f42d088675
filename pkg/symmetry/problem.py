"""Problem declarations: the equation, its jet space and the generator ansatz."""
from itertools import combinations_with_replacement

from symmetry import expr as ex
from symmetry.errors import NonPolynomialError, SpecError
from symmetry.jet import JetContext, VectorField


class UnknownSpec:
    """One coefficient unknown of the generator, e.g. xi1(t,x) for d/dt."""

    def __init__(self, name, coord, args, shape=None, poly_vars=None, degree=None):
        self.name = name
        self.coord = coord
        self.args = tuple(args)
        self.shape = ex.as_expr(shape) if shape is not None else ex.ONE
        self.poly_vars = tuple(poly_vars) if poly_vars is not None else None
        self.degree = degree
        if self.degree is not None and self.degree < 0:
            raise SpecError(f"negative degree for {name}")

    def atom(self):
        return ex.func(self.name, self.args)

    def copy(self, **changes):
        fields = dict(name=self.name, coord=self.coord, args=self.args, shape=self.shape,
                      poly_vars=self.poly_vars, degree=self.degree)
        fields.update(changes)
        return UnknownSpec(**fields)

    def __repr__(self):
        return f"{self.name}({','.join(self.args)})"


class AnsatzSpec:
    """Polynomial ansatz per unknown: shape * sum_k c_k * monomial_k.

    Args:
        degree: default degree bound for unknowns without their own
        shapes: name -> (shape Expr, polynomial variables, degree) overrides
    """

    def __init__(self, degree=3, shapes=None):
        if degree < 0:
            raise SpecError("ansatz degree must be >= 0")
        self.degree = degree
        self.shapes = dict(shapes or {})

    def with_degree(self, degree):
        return AnsatzSpec(degree, self.shapes)

    def terms(self, unknown):
        """(shape, monomials) for an unknown, monomials ordered by degree."""
        shape, poly_vars, degree = unknown.shape, unknown.poly_vars, unknown.degree
        if unknown.name in self.shapes:
            shape, poly_vars, degree = self.shapes[unknown.name]
        poly_vars = unknown.args if poly_vars is None else poly_vars
        degree = self.degree if degree is None else degree
        monomials = []
        for d in range(degree + 1):
            for combo in combinations_with_replacement(poly_vars, d):
                monomials.append(ex.mul(*[ex.symbol(n) for n in combo]))
        return ex.as_expr(shape), monomials


class ProblemSpec:
    """A scalar evolution equation lhs = rhs with its generator ansatz.

    The equation is kept as delta = lhs - rhs together with the leading jet
    coordinate it is solved for and the solved right side.
    """

    def __init__(self, jet, lhs, rhs, unknowns, parameters=(), name="", functions=None):
        self.jet = jet
        self.lhs = ex.as_expr(lhs)
        self.rhs = ex.as_expr(rhs)
        self.unknowns = list(unknowns)
        self.parameters = tuple(parameters)
        self.name = name
        # extra arbitrary functions introduced by specialization (phi(u), ...)
        self.functions = dict(functions or {})
        self.delta = ex.sub(self.lhs, self.rhs)
        self.leading, self.solved = self._solve_leading()
        self._validate()
        # stage-1 determining system, filled by detsys.generic_system
        self.generic_system = None

    @property
    def mode(self):
        return "equivalence" if self.jet.equivalence else "base"

    @property
    def coordinates(self):
        return self.jet.coordinates

    def _solve_leading(self):
        candidates = []
        for sym in self.jet.jet_symbols:
            if sym not in self.delta.atoms:
                continue
            try:
                grouped = ex.collect(self.delta, [sym])
            except NonPolynomialError:
                continue
            if set(grouped) - {ex.ONE, sym}:
                continue
            coeff = grouped.get(sym)
            if isinstance(coeff, ex.Const):
                candidates.append((sym, coeff))
        if isinstance(self.lhs, ex.Symbol) and any(sym == self.lhs for sym, _ in candidates):
            candidates = [c for c in candidates if c[0] == self.lhs]
        if len(candidates) != 1:
            names = ", ".join(str(s) for s, _ in candidates) or "none"
            raise SpecError(f"equation must be solvable for exactly one jet coordinate (candidates: {names})")
        sym, coeff = candidates[0]
        rest = ex.sub(self.delta, ex.mul(coeff, sym))
        return sym, ex.div(ex.neg(rest), coeff)

    def _validate(self):
        declared = set(self.jet.base) | set(self.jet.jet_names) | set(self.parameters)
        declared |= set(self.jet.variable_index)
        for atom in self.delta.atoms:
            if isinstance(atom, ex.Symbol) and atom.name not in declared:
                raise SpecError(f"undeclared symbol {atom.name} in the equation")
        if len(self.unknowns) != len(self.jet.coordinates):
            raise SpecError(f"ansatz declares {len(self.unknowns)} unknowns for "
                            f"{len(self.jet.coordinates)} coordinates")
        for unknown, coord in zip(self.unknowns, self.jet.coordinates):
            if unknown.coord != coord:
                raise SpecError(f"unknown {unknown.name} is attached to {unknown.coord}, expected {coord}")
            for arg in unknown.args:
                if arg not in self.jet.coordinates:
                    raise SpecError(f"{unknown.name} depends on {arg}, which is not a coordinate")

    def generic_field(self):
        """Generator with every coefficient an unknown function atom."""
        return VectorField(self.coordinates, {u.coord: u.atom() for u in self.unknowns})

    def unknown_names(self):
        return {u.name for u in self.unknowns}

    def allowed_arguments(self):
        return {u.coord: u.args for u in self.unknowns}

    def parse_context(self, lenient=False):
        functions = {u.name: u.args for u in self.unknowns}
        functions.update(self.functions)
        return self.jet.parse_context(self.parameters, functions, lenient=lenient)

    def unrestricted(self):
        """Copy whose unknowns depend on every base variable."""
        base = self.jet.base
        unknowns = [u.copy(args=tuple(dict.fromkeys(base + u.args))) if u.coord in base else u
                    for u in self.unknowns]
        return ProblemSpec(self.jet, self.lhs, self.rhs, unknowns, self.parameters,
                           self.name + " (unrestricted)", self.functions)

    def with_unknown(self, name, **changes):
        unknowns = [u.copy(**changes) if u.name == name else u for u in self.unknowns]
        return ProblemSpec(self.jet, self.lhs, self.rhs, unknowns, self.parameters, self.name, self.functions)

    def specialize(self, name, value, parameters=()):
        """Replace the arbitrary function name by value and re-validate.

        Function atoms in value (phi(u), ...) become arbitrary functions of the
        new problem; names in parameters are added as constants.  A value that
        makes a derivative of name appearing in the equation vanish is rejected,
        the class requires E_u != 0.
        """
        if self.jet.equivalence:
            raise SpecError("specialization is defined for base problems only")
        if name not in self.jet.arbitrary:
            raise SpecError(f"{name} is not an arbitrary function")
        value = ex.as_expr(value)
        for atom in self.delta.atoms:
            if isinstance(atom, ex.FuncAtom) and atom.name == name and atom.index:
                derivative = value
                for sym in atom.index:
                    derivative = ex.differentiate(derivative, sym)
                if derivative.is_zero:
                    raise SpecError(f"{name} = {value} makes {atom} vanish")
        args = set(self.jet.arbitrary[name])
        allowed = args | set(self.parameters) | set(parameters)
        for atom in value.atoms:
            if isinstance(atom, ex.Symbol) and atom.name not in allowed:
                raise SpecError(f"{name} = {value} depends on {atom.name}")
        functions = dict(self.functions)
        for atom in value.atoms:
            if isinstance(atom, ex.FuncAtom):
                functions[atom.name] = atom.args
        arbitrary = {k: v for k, v in self.jet.arbitrary.items() if k != name}
        jet = JetContext(self.jet.independents, self.jet.dependent, self.jet.order, arbitrary)
        delta = ex.substitute_function(self.delta, name, value)
        lhs = self.leading
        rhs = ex.sub(lhs, delta)
        spec = ProblemSpec(jet, lhs, rhs, self.unknowns, tuple(self.parameters) + tuple(parameters),
                           f"{self.name} [{name} = {value}]", functions)
        return spec

    def arbitrary_atoms(self, e):
        atoms = self.jet.arbitrary_atoms(e)
        atoms |= {a for a in e.atoms if isinstance(a, ex.FuncAtom) and a.name in self.functions}
        return atoms

    def equation_str(self):
        return f"{ex.to_string(self.leading)} = {ex.to_string(self.solved)}"

    def __repr__(self):
        return f"ProblemSpec({self.name or self.equation_str()})"
