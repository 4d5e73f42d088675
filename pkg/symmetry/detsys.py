"""Determining systems: symmetry condition, splitting, verification and fixture diffs."""
from collections import namedtuple
from fractions import Fraction

from lib.general import make_rng, rank, random_rational
from symmetry import expr as ex
from symmetry.errors import NonlinearSystemError, NonPolynomialError, ProlongationError
from symmetry.jet import apply_field, prolong, prolong_equivalence


class Constraint:
    """expr = 0, tagged with the monomial it was split from."""

    def __init__(self, expr, monomial=ex.ONE, source=None):
        self.expr = expr
        self.monomial = monomial
        self.source = source

    def __eq__(self, other):
        return isinstance(other, Constraint) and self.expr == other.expr

    def __hash__(self):
        return hash(self.expr)

    def __str__(self):
        return f"{ex.to_string(self.expr)} = 0"

    def __repr__(self):
        return f"Constraint({self}, from {self.monomial})"


class DeterminingSystem:
    def __init__(self, constraints, split_atoms=(), spec=None, stage=1, notes=None):
        self.constraints = list(constraints)
        self.split_atoms = tuple(split_atoms)
        self.spec = spec
        self.stage = stage
        self.notes = list(notes or [])

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]

    def exprs(self):
        return [c.expr for c in self.constraints]

    def contains(self, e, arbitrary=()):
        """True when e, normalized, is one of the constraints."""
        target = normalize(ex.as_expr(e), arbitrary)
        return any(c.expr == target for c in self.constraints)

    def lines(self):
        return [str(c) for c in self.constraints]


def normalize(e, arbitrary=()):
    """Divide by the leading rational and reduce common powers of arbitrary atoms to the first power."""
    terms = ex.terms_of(e)
    if not terms:
        return ex.ZERO
    reduce_by = []
    for atom in arbitrary:
        lowest = None
        for term in terms:
            _, factors = ex.factors_of(term)
            k = 0
            for f in factors:
                if f == atom:
                    k = 1
                elif isinstance(f, ex.Power) and f.base == atom and f.exp.denominator == 1 and f.exp > 0:
                    k = int(f.exp)
            lowest = k if lowest is None else min(lowest, k)
        if lowest and lowest > 1:
            reduce_by.append(ex.power(atom, 1 - lowest))
    if reduce_by:
        e = ex.mul(e, *reduce_by)
        terms = ex.terms_of(e)
    lead, _ = ex.split_coeff(terms[0])
    return ex.mul(Fraction(1) / lead, e)


def on_shell(e, spec):
    """Replace the leading coordinate by the solved right side of the equation."""
    return ex.substitute(e, spec.leading, spec.solved)


def prolonged_field(v, spec):
    if spec.jet.equivalence:
        return prolong_equivalence(v, spec.jet, spec.allowed_arguments() if _is_generic(v, spec) else None)
    return prolong(v, spec.jet)


def _is_generic(v, spec):
    return all(v[u.coord] == u.atom() for u in spec.unknowns)


def _check_prolongation(pv, spec):
    covered = set(pv.coords) | set(pv.prolongation) | set(spec.parameters)
    for atom in spec.delta.atoms:
        if isinstance(atom, ex.Symbol) and atom.name not in covered:
            raise ProlongationError(f"{atom.name} in the equation is not covered by the prolongation")


def symmetry_condition(v, spec):
    """pr(v) applied to lhs - rhs, on shell; zero iff v is a symmetry of a base problem."""
    return _condition(prolonged_field(v, spec), spec)


def _condition(pv, spec):
    _check_prolongation(pv, spec)
    return on_shell(apply_field(pv, spec.delta), spec)


def auxiliary_conditions(pv, spec):
    """Coefficients of a prolonged equivalence field along E_t, E_x, h_t, h_u."""
    return {name: pv.prolongation[name] for name in spec.jet.constrained}


def split(e, atoms, arbitrary=None, normalized=True, source=None):
    """Split e by monomials in atoms, then by monomials in the arbitrary atoms.

    Args:
        e: expression polynomial in atoms
        atoms: jet coordinates to split over
        arbitrary: atoms of arbitrary functions; when given, a stage-1
            constraint with several monomials in them is split again into the
            cofactors; a single monomial keeps its factor
        normalized: normalize and deduplicate the constraints
    Returns:
        DeterminingSystem
    """
    arb = tuple(sorted(arbitrary or (), key=ex.sort_key))
    stage1 = ex.collect(e, atoms)
    pieces = []
    for mono, coeff in stage1.items():
        if arbitrary is None:
            pieces.append((coeff, mono))
            continue
        present = [a for a in arb if a in coeff.atoms]
        try:
            inner = ex.collect(coeff, present) if present else {ex.ONE: coeff}
        except NonPolynomialError:
            inner = {ex.ONE: coeff}
        if len(inner) == 1:
            pieces.append((coeff, mono))
            continue
        for sub_mono, sub_coeff in inner.items():
            pieces.append((sub_coeff, ex.mul(mono, sub_mono)))
    constraints = []
    seen = set()
    for coeff, mono in pieces:
        if normalized:
            coeff = normalize(coeff, arb)
        if coeff.is_zero or (normalized and coeff in seen):
            continue
        seen.add(coeff)
        constraints.append(Constraint(coeff, mono, source))
    return DeterminingSystem(constraints, atoms, stage=2 if arbitrary is not None else 1)


def determining_system(spec, stage=2):
    """Determining system of the problem's generic generator.

    Stage 1 splits by jet monomials; stage 2 splits again over the arbitrary
    functions.  Equivalence problems also carry the auxiliary conditions
    (coefficients along E_t, E_x, h_t, h_u).
    """
    pv = prolonged_field(spec.generic_field(), spec)
    condition = _condition(pv, spec)
    arbitrary = spec.arbitrary_atoms(condition)
    system = split(condition, spec.jet.jet_symbols, arbitrary if stage >= 2 else None)
    if stage < 2:
        system = DeterminingSystem([Constraint(normalize(c.expr, arbitrary), c.monomial) for c in system],
                                   spec.jet.jet_symbols)
    for name, aux in auxiliary_conditions(pv, spec).items():
        if aux.is_zero:
            continue
        if stage >= 2:
            extra = split(aux, (), spec.arbitrary_atoms(aux))
            for c in extra:
                c.monomial = ex.mul(ex.symbol(name), c.monomial)
        else:
            extra = [Constraint(normalize(aux, spec.arbitrary_atoms(aux)), ex.symbol(name))]
        for c in extra:
            if c not in system.constraints:
                system.constraints.append(c)
    system.spec = spec
    system.stage = stage
    return system


def generic_system(spec):
    """Stage-1 system of spec, built once and kept on the spec."""
    if spec.generic_system is None:
        spec.generic_system = determining_system(spec, stage=1)
    return spec.generic_system


def _substitutable(v, spec):
    watched = set(spec.coordinates) | set(spec.jet.variable_index)
    for u in spec.unknowns:
        if (v[u.coord].free_symbols & watched) - set(u.args):
            return False
    return True


def verify(v, spec):
    """Nonzero residuals of the determining system for a concrete generator.

    Coefficients are substituted into the generic stage-1 system; fields whose
    coefficients leave the ansatz argument lists are checked directly.
    """
    if not _substitutable(v, spec):
        pv = prolonged_field(v, spec)
        residuals = [c.expr for c in split(_condition(pv, spec), spec.jet.jet_symbols, normalized=False)]
        residuals += [aux for aux in auxiliary_conditions(pv, spec).values() if not aux.is_zero]
        return residuals
    residuals = []
    for c in generic_system(spec):
        r = c.expr
        for u in spec.unknowns:
            r = ex.substitute_function(r, u.name, v[u.coord])
        if not r.is_zero:
            residuals.append(r)
    return residuals


def is_symmetry(v, spec):
    return not verify(v, spec)


FixtureEntry = namedtuple("FixtureEntry", ["index", "source", "text", "implied"])


class FixtureDiff:
    """Span membership of fixture constraints in the generated system and back."""

    def __init__(self, fixture_entries, generated_entries, notes=()):
        self.fixture_entries = fixture_entries
        self.generated_entries = generated_entries
        self.notes = list(notes)

    @property
    def unimplied_fixture(self):
        return [e for e in self.fixture_entries if not e.implied]

    @property
    def unimplied_generated(self):
        return [e for e in self.generated_entries if not e.implied]

    @property
    def matches(self):
        return not self.unimplied_fixture and not self.unimplied_generated


def _linear_form(e, unknown_names):
    atoms = [a for a in e.atoms if isinstance(a, ex.FuncAtom) and a.name in unknown_names]
    grouped = ex.collect(e, atoms)
    for mono in grouped:
        if mono != ex.ONE and not (isinstance(mono, ex.FuncAtom) and mono.name in unknown_names):
            raise NonlinearSystemError(f"{e} is not linear in the unknowns")
    return grouped


def _evaluate_rows(forms, columns, point):
    rows = []
    for form in forms:
        row = []
        for col in columns:
            value = ex.evaluate(form.get(col, ex.ZERO), point)
            if not isinstance(value, ex.Const):
                raise NonlinearSystemError(f"coefficient {value} does not evaluate to a number")
            row.append(value.value)
        rows.append(row)
    return rows


def diff_fixture(generated, fixture, seed=42):
    """Which fixture constraints lie in the span of the generated ones, and vice versa.

    The span is taken over the coefficient field (everything but the unknown
    function atoms), by ranks at a random rational point.  The unknown-free
    remainder of a constraint is an extra coordinate.
    """
    spec = generated.spec
    unknown_names = spec.unknown_names() if spec is not None else {
        a.name for c in generated for a in c.expr.atoms if isinstance(a, ex.FuncAtom)}
    gen_forms = [_linear_form(c.expr, unknown_names) for c in generated]
    fix_forms = [_linear_form(c.expr, unknown_names) for c in fixture]
    columns = []
    for form in gen_forms + fix_forms:
        for mono in form:
            if mono not in columns:
                columns.append(mono)
    columns.sort(key=ex.sort_key)

    rng = make_rng(seed)
    coefficient_atoms = set()
    for form in gen_forms + fix_forms:
        for coeff in form.values():
            coefficient_atoms |= coeff.atoms
    point = {a: random_rational(rng) for a in sorted(coefficient_atoms, key=ex.sort_key)}
    gen_rows = _evaluate_rows(gen_forms, columns, point)
    fix_rows = _evaluate_rows(fix_forms, columns, point)

    gen_rank = rank(gen_rows, len(columns))
    fix_rank = rank(fix_rows, len(columns))
    fixture_entries = []
    for i, (c, row) in enumerate(zip(fixture, fix_rows)):
        implied = rank(gen_rows + [row], len(columns)) == gen_rank
        fixture_entries.append(FixtureEntry(i + 1, c.source, str(c), implied))
    generated_entries = []
    for i, (c, row) in enumerate(zip(generated, gen_rows)):
        implied = rank(fix_rows + [row], len(columns)) == fix_rank
        generated_entries.append(FixtureEntry(i + 1, c.source, str(c), implied))
    return FixtureDiff(fixture_entries, generated_entries, fixture.notes)
