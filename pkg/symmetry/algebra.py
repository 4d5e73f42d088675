"""Finite dimensional Lie algebras of vector fields."""
import itertools
import math
from fractions import Fraction

import tqdm

from lib.general import nullspace, rank, reduced_echelon, solve_linear, to_matrix
from lib.logger import logger
from symmetry import expr as ex
from symmetry.errors import ClosureError, NonPolynomialError, SpaceMismatchError, SpecError, UnsupportedSeriesError
from symmetry.jet import VectorField, apply_field
from symmetry.parser import ParseContext, parse


def bracket(X, Y):
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    if X.coords != Y.coords:
        raise SpaceMismatchError(f"({', '.join(X.coords)}) vs ({', '.join(Y.coords)})")
    return VectorField(X.coords, {c: ex.sub(apply_field(X, Y[c]), apply_field(Y, X[c])) for c in X.coords})


def jacobi(X, Y, Z):
    return bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))


def _flatten(v):
    """{(coordinate, monomial): rational} for a field with rational coefficients."""
    flat = {}
    for coord in v.coords:
        e = v[coord]
        atoms = set(e.atoms) | ex.find(e, ex.Exp) | ex.find(e, ex.Log)
        for mono, coeff in ex.collect(e, atoms).items():
            if not isinstance(coeff, ex.Const):
                raise SpecError(f"coefficient {coeff} of d/d{coord} is not rational")
            flat[(coord, mono)] = coeff.value
    return flat


def span_rank(fields):
    """Dimension of the rational span of fields with rational coefficients."""
    flats = [_flatten(v) for v in fields]
    keys = sorted({k for flat in flats for k in flat}, key=lambda k: (k[0], ex.sort_key(k[1])))
    return rank([[flat.get(k, Fraction(0)) for k in keys] for flat in flats], len(keys))


def _matvec(A, v):
    return [sum((A[k][j] * v[j] for j in range(len(v))), Fraction(0)) for k in range(len(A))]


def _expr_matvec(M, v):
    return [ex.add(*[ex.mul(M[k][j], v[j]) for j in range(len(v))]) for k in range(len(M))]


def _provably_nonzero(e, nonzero):
    if isinstance(e, ex.Const):
        return e.value != 0
    if isinstance(e, ex.Symbol):
        return e.name in nonzero
    if isinstance(e, ex.Exp):
        return True
    if isinstance(e, ex.Power):
        return _provably_nonzero(e.base, nonzero)
    if isinstance(e, ex.Product):
        return all(_provably_nonzero(f, nonzero) for f in e.factors)
    return False


class LieAlgebra:
    """Ordered basis of vector fields with its structure constants.

    Args:
        basis: VectorFields on one coordinate space
        names: basis names, Y1..Yn by default
    """

    def __init__(self, basis, names=None):
        self.basis = list(basis)
        self.names = list(names) if names is not None else [f"Y{i + 1}" for i in range(len(self.basis))]
        assert len(self.names) == len(self.basis), "one name per basis field"
        if not self.basis:
            raise SpecError("empty basis")
        coords = self.basis[0].coords
        for v in self.basis:
            if v.coords != coords:
                raise SpaceMismatchError(f"({', '.join(v.coords)}) vs ({', '.join(coords)})")
        self.coords = coords

        self._flat = [_flatten(v) for v in self.basis]
        self._keys = sorted({k for flat in self._flat for k in flat}, key=lambda k: (k[0], ex.sort_key(k[1])))
        rows = [[flat.get(k, Fraction(0)) for flat in self._flat] for k in self._keys]
        if rank(rows, self.dim) != self.dim:
            raise SpecError("basis fields are linearly dependent")

        n = self.dim
        self.structure = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            try:
                c = self.coordinates(bracket(self.basis[i], self.basis[j]))
            except ClosureError:
                raise ClosureError((self.names[i], self.names[j]),
                                   f"[{self.names[i]}, {self.names[j]}] is not in the span of the basis") from None
            self.structure[i][j] = c
            self.structure[j][i] = [-x for x in c]
        self.closed = True
        # ad[i][k][j] = c^k_{ij}
        self.ad = [[[self.structure[i][j][k] for j in range(n)] for k in range(n)] for i in range(n)]
        self._adjoint_cache = {}
        logger.info(f"Lie algebra {', '.join(self.names)} on ({', '.join(self.coords)})")

    @property
    def dim(self):
        return len(self.basis)

    def index(self, key):
        if isinstance(key, str):
            if key not in self.names:
                raise SpecError(f"unknown basis element {key}")
            return self.names.index(key)
        assert 0 <= key < self.dim, "basis index out of range"
        return key

    def coordinates(self, w):
        """Rational coordinates of w in the basis; ClosureError when w is outside the span."""
        if w.coords != self.coords:
            raise SpaceMismatchError(f"({', '.join(w.coords)}) vs ({', '.join(self.coords)})")
        flat = _flatten(w)
        keys = self._keys + [k for k in flat if k not in set(self._keys)]
        rows = [[f.get(k, Fraction(0)) for f in self._flat] for k in keys]
        rhs = [flat.get(k, Fraction(0)) for k in keys]
        solution = solve_linear(rows, rhs, self.dim)
        if solution is None:
            raise ClosureError(None, f"{w} is not in the span of the basis")
        return solution

    def combination(self, coeffs):
        """The vector field sum_i coeffs[i] * Y_i."""
        assert len(coeffs) == self.dim, "coefficient vector length must equal the dimension"
        out = VectorField(self.coords)
        for c, v in zip(coeffs, self.basis):
            c = ex.as_expr(c)
            if not c.is_zero:
                out = out + v.scale(c)
        return out

    def bracket_coordinates(self, u, v):
        """[sum u_i Y_i, sum v_j Y_j] in coordinates; entries may be expressions."""
        n = self.dim
        out = []
        for k in range(n):
            terms = []
            for i in range(n):
                for j in range(n):
                    c = self.structure[i][j][k]
                    if c:
                        terms.append(ex.mul(c, u[i], v[j]))
            out.append(ex.add(*terms))
        return out

    def jacobi_residuals(self):
        """Basis triples whose cyclic bracket sum does not vanish."""
        bad = []
        for i, j, k in itertools.combinations(range(self.dim), 3):
            if not jacobi(self.basis[i], self.basis[j], self.basis[k]).is_zero:
                bad.append((self.names[i], self.names[j], self.names[k]))
        return bad

    def commutator_table(self):
        """table[i][j] = coordinates of [Y_i, Y_j]."""
        return [[list(self.structure[i][j]) for j in range(self.dim)] for i in range(self.dim)]

    def _series(self, i, j):
        """Ad(exp(s Y_i)) Y_j as (root, eigencomponent) pairs or a nilpotent chain."""
        A = self.ad[i]
        n = self.dim
        v = [Fraction(int(k == j)) for k in range(n)]
        chain = [v]
        for _ in range(n):
            w = _matvec(A, chain[-1])
            if not any(w):
                return "nilpotent", chain
            chain.append(w)

        for m in range(1, n + 1):
            columns = chain[:m]
            rows = [[col[k] for col in columns] for k in range(n)]
            c = solve_linear(rows, chain[m], m)
            if c is not None:
                break
        # minimal polynomial lambda^m - sum_k c_k lambda^k
        bound = 1 + math.ceil(max(abs(x) for x in c))
        roots = [r for r in range(-bound, bound + 1)
                 if Fraction(r) ** m - sum(c[k] * Fraction(r) ** k for k in range(m)) == 0]
        if len(roots) != m:
            raise UnsupportedSeriesError(
                f"Ad(exp(s*{self.names[i]})){self.names[j]}: ad is neither nilpotent nor integer diagonal")
        parts = []
        for r in roots:
            part = v
            for other in roots:
                if other == r:
                    continue
                shifted = [a - other * b for a, b in zip(_matvec(A, part), part)]
                part = [x / (r - other) for x in shifted]
            parts.append((r, part))
        return "diagonal", parts

    def adjoint(self, i, j, s="s"):
        """Coordinates of Ad(exp(s Y_i)) Y_j = sum_n (-s)^n / n! ad(Y_i)^n Y_j."""
        i, j = self.index(i), self.index(j)
        s = ex.symbol(s) if isinstance(s, str) else ex.as_expr(s)
        if (i, j) not in self._adjoint_cache:
            self._adjoint_cache[(i, j)] = self._series(i, j)
        kind, data = self._adjoint_cache[(i, j)]
        out = [ex.ZERO] * self.dim
        if kind == "nilpotent":
            for n, w in enumerate(data):
                scale = ex.mul(Fraction((-1) ** n, math.factorial(n)), ex.power(s, n))
                out = [ex.add(o, ex.mul(scale, x)) for o, x in zip(out, w)]
        else:
            for r, w in data:
                scale = ex.exp(ex.mul(-r, s))
                out = [ex.add(o, ex.mul(scale, x)) for o, x in zip(out, w)]
        return out

    def adjoint_matrix(self, i, s="s"):
        """M[k][j] = coefficient of Y_k in Ad(exp(s Y_i)) Y_j."""
        columns = [self.adjoint(i, j, s) for j in range(self.dim)]
        return [[columns[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def adjoint_table(self, s="s"):
        """table[i][j] = coordinates of Ad(exp(s Y_i)) Y_j."""
        return [[self.adjoint(i, j, s) for j in range(self.dim)] for i in range(self.dim)]

    def act(self, i, vector, s="s"):
        return _expr_matvec(self.adjoint_matrix(i, s), [ex.as_expr(a) for a in vector])

    def reduce(self, start, steps):
        """Apply Ad(exp(value * Y_key)) for each (key, value) in steps, left to right."""
        vector = [ex.as_expr(a) for a in start]
        assert len(vector) == self.dim, "coefficient vector length must equal the dimension"
        for key, value in steps:
            vector = self.act(self.index(key), vector, ex.as_expr(value))
        return vector

    def is_automorphism(self, i, s="s"):
        """True when Ad(exp(s Y_i)) preserves every bracket of basis elements."""
        M = self.adjoint_matrix(self.index(i), s)
        columns = [[M[k][j] for k in range(self.dim)] for j in range(self.dim)]
        for a, b in itertools.combinations(range(self.dim), 2):
            lhs = _expr_matvec(M, [ex.const(x) for x in self.structure[a][b]])
            rhs = self.bracket_coordinates(columns[a], columns[b])
            if any(x != y for x, y in zip(lhs, rhs)):
                return False
        return True

    def killing_matrix(self):
        n = self.dim
        K = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                K[i][j] = sum((self.ad[i][k][l] * self.ad[j][l][k] for k in range(n) for l in range(n)),
                              Fraction(0))
        return K

    def killing_form(self, v=None, w=None):
        """tr(ad v o ad w); symbolic a1..an, b1..bn when v, w are omitted."""
        n = self.dim
        v = v if v is not None else [ex.symbol(f"a{i + 1}") for i in range(n)]
        w = w if w is not None else [ex.symbol(f"b{i + 1}") for i in range(n)]
        K = self.killing_matrix()
        return ex.add(*[ex.mul(K[i][j], v[i], w[j]) for i in range(n) for j in range(n) if K[i][j]])

    def derived_series(self):
        """[g, g^(1), g^(2), ...] as reduced row bases of coordinate vectors, ending at {0} or a fixed point."""
        n = self.dim
        current = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        series = [current]
        while current:
            products = []
            for u, v in itertools.combinations(current, 2):
                c = [x.value for x in self.bracket_coordinates([ex.const(a) for a in u], [ex.const(b) for b in v])]
                if any(c):
                    products.append(c)
            if products:
                red, _ = reduced_echelon(to_matrix(products, n))
                nxt = [list(row) for row in red]
            else:
                nxt = []
            if len(nxt) == len(current):
                break
            series.append(nxt)
            current = nxt
        return series

    def is_solvable(self):
        return not self.derived_series()[-1]

    def is_semisimple(self):
        return rank(self.killing_matrix(), self.dim) == self.dim

    def center(self):
        """Basis of {v : [v, Y_j] = 0 for all j}."""
        n = self.dim
        rows = []
        for j in range(n):
            for k in range(n):
                rows.append([self.structure[i][j][k] for i in range(n)])
        return nullspace(rows, n)

    def combination_str(self, coeffs):
        return combination_str(coeffs, self.names)

    def parse_combination(self, text, context=None):
        return parse_combination(text, self.names, context)

    def search_reduction(self, start, cancel, max_length=3, nonzero=(), generators=None, progress=False):
        """Bounded exhaustive search for adjoint sequences that cancel components.

        Every sequence of at most max_length generators is applied with fresh
        symbolic parameters s1, s2, ...  Each component listed in cancel is then
        classified as zero, nonzero (a product of symbols in nonzero, constants
        and exponentials), solvable (linear in one parameter with a nonzero
        coefficient) or undecided.

        Returns:
            ReductionReport
        """
        nonzero = set(nonzero)
        start = [ex.as_expr(a) for a in start]
        cancel = [self.index(c) for c in cancel]
        generators = [self.index(g) for g in generators] if generators is not None else list(range(self.dim))
        sequences = [seq for length in range(1, max_length + 1)
                     for seq in itertools.product(generators, repeat=length)]
        outcomes = []
        for seq in tqdm.tqdm(sequences, disable=not progress):
            params = [ex.symbol(f"s{k + 1}") for k in range(len(seq))]
            vector = start
            for g, s in zip(seq, params):
                vector = self.act(g, vector, s)
            statuses = {}
            solutions = {}
            used = set()
            for c in cancel:
                status, solution = _classify_component(vector[c], params, nonzero, used)
                statuses[c] = status
                if solution is not None:
                    used.add(solution[0])
                    solutions[c] = solution
            outcomes.append(ReductionOutcome([self.names[g] for g in seq], vector, statuses, solutions))
        return ReductionReport(start, cancel, outcomes, self._scalings(start, nonzero))

    def _scalings(self, start, nonzero):
        """(p, q, generator, k): the ratio of components p and q picks up exp(k*s) under one generator."""
        s = ex.symbol("s")
        found = []
        live = [p for p, a in enumerate(start) if _provably_nonzero(a, nonzero)]
        for g in range(self.dim):
            vector = self.act(g, start, s)
            weights = {}
            for p in live:
                weights[p] = _exp_weight(ex.div(vector[p], start[p]), s)
            for p, q in itertools.combinations(live, 2):
                if weights[p] is not None and weights[q] is not None and weights[p] != weights[q]:
                    found.append((self.names[p], self.names[q], self.names[g], weights[p] - weights[q]))
        return found


def _exp_weight(ratio, s):
    """k when ratio == exp(k*s) for a rational k, None otherwise."""
    if ratio == ex.ONE:
        return Fraction(0)
    if not isinstance(ratio, ex.Exp):
        return None
    grouped = ex.collect(ratio.arg, [s])
    if set(grouped) != {s} or not isinstance(grouped[s], ex.Const):
        return None
    return grouped[s].value


def _classify_component(value, params, nonzero, used):
    if value.is_zero:
        return "zero", None
    if _provably_nonzero(value, nonzero):
        return "nonzero", None
    for s in params:
        if s in used or s not in value.atoms:
            continue
        try:
            grouped = ex.collect(value, [s])
        except NonPolynomialError:
            continue
        if set(grouped) - {ex.ONE, s}:
            continue
        slope = grouped.get(s, ex.ZERO)
        if _provably_nonzero(slope, nonzero):
            return "solvable", (s, ex.div(ex.neg(grouped.get(ex.ONE, ex.ZERO)), slope))
    return "undecided", None


class ReductionOutcome:
    def __init__(self, sequence, vector, statuses, solutions):
        self.sequence = sequence
        self.vector = vector
        self.statuses = statuses
        self.solutions = solutions

    @property
    def cancels(self):
        return all(status in ("zero", "solvable") for status in self.statuses.values())


class ReductionReport:
    def __init__(self, start, cancel, outcomes, scalings):
        self.start = start
        self.cancel = cancel
        self.outcomes = outcomes
        self.scalings = scalings

    @property
    def reducible(self):
        return any(o.cancels for o in self.outcomes)

    @property
    def witness(self):
        """Shortest sequence that cancels every requested component, if any."""
        return next((o for o in self.outcomes if o.cancels), None)

    @property
    def never_cancelled(self):
        """Requested components that are provably nonzero after every sequence."""
        return [c for c in self.cancel if all(o.statuses[c] == "nonzero" for o in self.outcomes)]


def _term_str(coeff, name):
    if coeff == ex.ONE:
        return name
    if coeff == ex.MINUS_ONE:
        return f"-{name}"
    text = ex.to_string(coeff)
    if isinstance(coeff, ex.Sum):
        text = f"({text})"
    return f"{text}*{name}"


def combination_str(coeffs, names):
    """'exp(2*s)*Y1', '-2*s*Y1 + Y3', '0'."""
    parts = [_term_str(ex.as_expr(c), name) for c, name in zip(coeffs, names) if not ex.as_expr(c).is_zero]
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def parse_combination(text, names, context=None):
    """Coefficient vector of a linear combination of basis names, e.g. 'Y3 - 2*s*Y1'."""
    if context is None:
        context = ParseContext.open()
    else:
        context.symbols |= set(names)
    e = parse(text, context)
    symbols = [ex.symbol(n) for n in names]
    grouped = ex.collect(e, symbols)
    out = [ex.ZERO] * len(names)
    for mono, coeff in grouped.items():
        if mono not in symbols:
            raise SpecError(f"{text} is not a linear combination of {', '.join(names)}")
        out[symbols.index(mono)] = coeff
    return out
