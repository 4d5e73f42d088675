"""Preliminary group classification from optimal-system representatives."""
import itertools
from fractions import Fraction

from lib.general import make_rng, random_rational
from lib.logger import logger
from symmetry import expr as ex
from symmetry.detsys import verify
from symmetry.errors import UnsupportedShapeError
from symmetry.jet import apply_field

PROJECTION = ("x", "u", "E", "h")
BASE = ("t", "x", "u")


def project(v, coords=PROJECTION):
    """Components of v along coords; a zero result means the representative is excluded."""
    return v.restrict(tuple(c for c in coords if c in v.coords))


def _shape(Z, coord, frozen):
    """('translation', m) for m*d/dc, ('scaling', m) for m*c*d/dc, m built from frozen coordinates."""
    g = Z[coord]
    c = ex.symbol(coord)
    moving = set(Z.coords) - set(frozen)
    if coord not in g.free_symbols:
        kind, m = "translation", g
    else:
        m = ex.div(g, c)
        if coord in m.free_symbols:
            raise UnsupportedShapeError(f"coefficient {g} of d/d{coord} is neither constant nor linear in {coord}")
        kind = "scaling"
    if m.free_symbols & moving:
        raise UnsupportedShapeError(f"coefficient {g} of d/d{coord} depends on moving coordinates")
    return kind, m


def _pair_invariant(p, shape_p, q, shape_q):
    kind_p, m_p = shape_p
    kind_q, m_q = shape_q
    P, Q = ex.symbol(p), ex.symbol(q)
    ratio = ex.div(m_q, m_p)
    if kind_p == "translation" and kind_q == "translation":
        return ex.sub(Q, ex.mul(ratio, P))
    if kind_p == "translation":
        return ex.mul(Q, ex.exp(ex.neg(ex.mul(ratio, P))))
    if kind_q == "translation":
        return ex.sub(Q, ex.mul(ratio, ex.log(P)))
    if isinstance(ratio, ex.Const):
        return ex.mul(Q, ex.power(P, -ratio.value))
    return ex.mul(Q, ex.exp(ex.neg(ex.mul(ratio, ex.log(P)))))


def invariants(Z):
    """First integrals of Z by the method of characteristics.

    Coordinates with a zero coefficient are invariants themselves; every other
    coordinate is paired with the first moving one.
    """
    frozen = [c for c in Z.coords if Z[c].is_zero]
    moving = [c for c in Z.coords if not Z[c].is_zero]
    out = [ex.symbol(c) for c in frozen]
    if not moving:
        return out
    pivot = moving[0]
    pivot_shape = _shape(Z, pivot, frozen)
    for q in moving[1:]:
        out.append(_pair_invariant(pivot, pivot_shape, q, _shape(Z, q, frozen)))
    return out


def invariant_check(Z, I, positive=()):
    """True when Z annihilates I."""
    return ex.canonicalize(apply_field(Z, ex.as_expr(I)), positive).is_zero


def _positive_point(exprs, rng):
    point = {}
    for e in exprs:
        for atom in sorted(e.atoms, key=ex.sort_key):
            if atom not in point:
                point[atom] = abs(random_rational(rng))
    return point


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    terms = []
    for j in range(n):
        if M[0][j].is_zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        terms.append(ex.mul((-1) ** j, M[0][j], _det(minor)))
    return ex.add(*terms)


def jacobian_rank(exprs, coords, seed=42):
    """Rank of d(exprs)/d(coords) at a random positive rational point."""
    rng = make_rng(seed)
    point = _positive_point(exprs, rng)
    M = [[ex.evaluate(ex.differentiate(e, c), point) for c in coords] for e in exprs]
    for r in range(min(len(exprs), len(coords)), 0, -1):
        for rows in itertools.combinations(range(len(exprs)), r):
            for cols in itertools.combinations(range(len(coords)), r):
                if not _det([[M[i][j] for j in cols] for i in rows]).is_zero:
                    return r
    return 0


def functionally_dependent(a, b, coords, seed=42):
    return jacobian_rank([a, b], coords, seed) < 2


class Feasibility:
    def __init__(self, feasible, reason, E_form=None, h_form=None, blocking=None):
        self.feasible = feasible
        self.reason = reason
        self.E_form = E_form
        self.h_form = h_form
        self.blocking = blocking

    def __bool__(self):
        return self.feasible


def feasibility(Z, invs, constant="c", function="phi", dependent="u", space="x",
                conductivity="E", reaction="h"):
    """Can the invariant relations be solved for E = E(u) and h = h(x)?

    Returns:
        Feasibility with the forms E = phi(u) and h = ... when they can
    """
    u, E, h = ex.symbol(dependent), ex.symbol(conductivity), ex.symbol(reaction)
    if u not in invs:
        return Feasibility(False, f"{dependent} is not an invariant")
    with_E = [I for I in invs if conductivity in I.free_symbols]
    if not with_E:
        return Feasibility(False, f"no invariant involves {conductivity}")
    E_form = None
    for I in with_E:
        nu = ex.differentiate(I, conductivity)
        if ex.mul(E, nu) == I and nu.free_symbols <= {dependent}:
            E_form = ex.func(function, (dependent,))
            break
    if E_form is None:
        blocking = with_E[0]
        stray = sorted(blocking.free_symbols - {conductivity, dependent})
        return Feasibility(False, f"the {conductivity}-invariant {blocking} depends on {', '.join(stray)}",
                           blocking=blocking)

    c = ex.symbol(constant)
    h_form = None
    for I in invs:
        if reaction not in I.free_symbols or not I.free_symbols <= {reaction, space}:
            continue
        a = ex.differentiate(I, reaction)
        b = ex.sub(I, ex.mul(a, h))
        if reaction in a.free_symbols or reaction in b.free_symbols:
            continue
        k = _monomial_exponent(a, space)
        if b.is_zero and k is not None and k != 0:
            h_form = ex.mul(ex.power(c, k), ex.power(ex.symbol(space), -k))
        else:
            h_form = ex.div(ex.sub(c, b), a)
        break
    if h_form is None:
        return Feasibility(False, f"no invariant of ({space}, {reaction}) alone", E_form=E_form)
    return Feasibility(True, "invariants resolve to E(u) and h(x)", E_form, h_form)


def _monomial_exponent(a, space):
    """k when a == x^k, None otherwise."""
    x = ex.symbol(space)
    if a == ex.ONE:
        return Fraction(0)
    if a == x:
        return Fraction(1)
    if isinstance(a, ex.Power) and a.base == x:
        return a.exp
    return None


class ClassificationRow:
    """One line of the classification: Z, its invariants, E and h and the extra operators."""

    def __init__(self, sources, Z, invariants, feasibility, operators, equation=None, residuals=None):
        self.sources = list(sources)
        self.Z = Z
        self.invariants = invariants
        self.feasibility = feasibility
        self.operators = list(operators)
        self.equation = equation
        self.residuals = dict(residuals or {})

    @property
    def feasible(self):
        return self.feasibility.feasible

    @property
    def verified(self):
        return self.feasible and not any(self.residuals.values())


def specialize(spec, feas, constant="c"):
    """spec with E and h replaced by the forms of a feasible row."""
    conductivity, reaction = tuple(spec.jet.arbitrary)[:2]
    specialized = spec.specialize(conductivity, feas.E_form)
    return specialized.specialize(reaction, feas.h_form, parameters=(constant,))


def classification_row(representatives, spec, coords=PROJECTION):
    """Row for representatives sharing one projection; the first one defines Z."""
    names = [name for name, _ in representatives]
    Z = project(representatives[0][1], coords)
    invs = invariants(Z)
    feas = feasibility(Z, invs)
    operators = [project(A, BASE) for _, A in representatives]
    row = ClassificationRow(names, Z, invs, feas, operators)
    if feas.feasible:
        specialized = specialize(spec, feas)
        row.equation = specialized.equation_str()
        row.residuals = {str(X): verify(X, specialized) for X in operators}
        if not row.verified:
            logger.error(f"row {', '.join(names)}: an additional operator fails on {row.equation}")
    return row


def optimal_rows(representatives, spec, coords=PROJECTION):
    """Group representatives by projection; returns (rows, excluded names).

    Args:
        representatives: list of (name, VectorField) in optimal-system order
    """
    groups = []
    excluded = []
    for name, A in representatives:
        Z = project(A, coords)
        if Z.is_zero:
            excluded.append(name)
            continue
        for group in groups:
            if group[0] == Z:
                group[1].append((name, A))
                break
        else:
            groups.append((Z, [(name, A)]))
    return [classification_row(members, spec, coords) for _, members in groups], excluded
