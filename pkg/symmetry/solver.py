"""Solve linear determining systems with a polynomial ansatz over exact rationals."""
import tqdm

from lib.general import nullspace
from lib.logger import logger
from symmetry import expr as ex
from symmetry.detsys import determining_system, verify
from symmetry.errors import NonlinearSystemError
from symmetry.jet import VectorField
from symmetry.problem import AnsatzSpec


class SolutionSpace:
    """Basis of the solution space of a determining system at one ansatz degree.

    basis:       VectorFields, one per null-space vector
    assignments: basis index -> {constant name: Fraction}
    unresolved:  (constant, unknown, monomial) for constants that appear in no
                 equation; they span directions the system leaves free
    residuals:   basis index -> verify residuals (empty for a verified field)
    """

    def __init__(self, basis, assignments, unresolved, degree, residuals=None):
        self.basis = list(basis)
        self.assignments = list(assignments)
        self.unresolved = list(unresolved)
        self.degree = degree
        self.residuals = dict(residuals or {})
        self.stable = None
        self.probe_dimension = None

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def finite(self):
        """True when raising the degree did not add generators."""
        return bool(self.stable)

    @property
    def verified(self):
        return not any(self.residuals.values())

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


def _fresh_names(reserved, prefix="c"):
    k = 0
    while True:
        name = f"{prefix}{k}"
        k += 1
        if name not in reserved:
            yield name


def instantiate(spec, ansatz):
    """Replace every unknown by shape * sum_k c_k * monomial_k.

    Returns:
        field: VectorField with the instantiated coefficients
        constants: list of (constant Symbol, unknown name, monomial)
    """
    reserved = set(spec.coordinates) | set(spec.parameters) | set(spec.jet.variable_index)
    names = _fresh_names(reserved)
    coeffs = {}
    constants = []
    for unknown in spec.unknowns:
        shape, monomials = ansatz.terms(unknown)
        terms = []
        for mono in monomials:
            c = ex.symbol(next(names))
            constants.append((c, unknown.name, mono))
            terms.append(ex.mul(c, mono))
        coeffs[unknown.coord] = ex.mul(shape, ex.add(*terms))
    return VectorField(spec.coordinates, coeffs), constants


def linear_equations(exprs, constants, progress=False):
    """Rows of the homogeneous linear system over the constants.

    Each expression is split by its monomials in every other atom (exponential
    and logarithm nodes included); the coefficient of each monomial must be a
    rational combination of the constants.
    """
    constants = list(constants)
    column = {c: i for i, c in enumerate(constants)}
    rows = []
    seen = set()
    for e in tqdm.tqdm(exprs, disable=not progress):
        if e.is_zero:
            continue
        atoms = set(e.atoms) - set(constants)
        atoms |= ex.find(e, ex.Exp) | ex.find(e, ex.Log)
        for mono, coeff in ex.collect(e, atoms).items():
            row = [0] * len(constants)
            for c, value in ex.collect(coeff, constants).items():
                if c not in column or not isinstance(value, ex.Const):
                    raise NonlinearSystemError(f"coefficient of {mono} is not linear in the constants: {coeff}")
                row[column[c]] = value.value
            key = tuple(row)
            if any(key) and key not in seen:
                seen.add(key)
                rows.append(row)
    return rows


def _solve_at(system, spec, ansatz, progress):
    field, constants = instantiate(spec, ansatz)
    symbols = [c for c, _, _ in constants]
    exprs = []
    for c in system:
        e = c.expr
        for u in spec.unknowns:
            e = ex.substitute_function(e, u.name, field[u.coord])
        exprs.append(e)
    rows = linear_equations(exprs, symbols, progress)
    logger.info(f"{spec.name or 'problem'}: degree {ansatz.degree}, "
                f"{len(symbols)} constants, {len(rows)} equations")

    used = {i for row in rows for i, v in enumerate(row) if v != 0}
    unresolved = [(c.name, name, mono) for i, (c, name, mono) in enumerate(constants) if i not in used]

    basis = []
    assignments = []
    for vector in nullspace(rows, len(symbols)):
        assignment = {c.name: value for c, value in zip(symbols, vector)}
        values = {c: ex.const(value) for c, value in zip(symbols, vector)}
        basis.append(field.map(lambda e: ex.substitute_many(e, values)))
        assignments.append(assignment)
    return basis, assignments, unresolved


def solve(system, spec, ansatz=None, probe=True, progress=False):
    """Basis of the solutions of system inside the ansatz.

    Args:
        system: DeterminingSystem of spec
        spec: ProblemSpec whose unknowns are expanded
        ansatz: AnsatzSpec, degree 3 by default
        probe: also solve at degree + 1 and report whether the dimension changed
    Returns:
        SolutionSpace
    """
    ansatz = ansatz or AnsatzSpec()
    basis, assignments, unresolved = _solve_at(system, spec, ansatz, progress)
    residuals = {}
    for i, v in enumerate(basis):
        residuals[i] = verify(v, spec)
        if residuals[i]:
            logger.error(f"basis field {v} leaves {len(residuals[i])} nonzero residuals")
    space = SolutionSpace(basis, assignments, unresolved, ansatz.degree, residuals)

    if probe:
        higher, _, _ = _solve_at(system, spec, ansatz.with_degree(ansatz.degree + 1), progress)
        space.probe_dimension = len(higher)
        space.stable = len(higher) == space.dimension
        if not space.stable:
            logger.warning(f"dimension changes from {space.dimension} to {len(higher)} "
                           f"at degree {ansatz.degree + 1}")
    logger.info(f"{spec.name or 'problem'}: solution space of dimension {space.dimension}")
    return space


def solve_spec(spec, ansatz=None, probe=True, progress=False):
    return solve(determining_system(spec), spec, ansatz, probe, progress)


def unrestricted_point_check(spec, ansatz=None, probe=False, progress=False):
    """Solve again with xi1, xi2 depending on every base variable."""
    wide = spec.unrestricted()
    return solve(determining_system(wide), wide, ansatz, probe, progress)
