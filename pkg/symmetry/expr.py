"""Exact symbolic expressions.

Every node is immutable and is built through the smart constructors of this
module (add, mul, power, exp, log, func), which keep it canonical:
  - sums and products are flat and sorted by a fixed total order,
  - numeric factors are merged into one leading Fraction,
  - products are fully expanded over sums,
  - exponentials are merged into a single exp with summed argument,
  - rational powers of possibly-negative bases stay formal unless the base is
    declared positive.
"""
import math
from fractions import Fraction

from lib.general import random_rational
from symmetry.errors import DependencyError, NonPolynomialError, SubstitutionError

RANK_CONST = 0
RANK_SYMBOL = 1
RANK_POWER = 2
RANK_EXP = 3
RANK_LOG = 4
RANK_FUNC = 5
RANK_PRODUCT = 6
RANK_SUM = 7


class Expr:
    __slots__ = ("_key", "_hash", "_atoms", "_names")

    def __init__(self, key, hash_value):
        self._key = key
        self._hash = hash_value
        self._atoms = None
        self._names = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return isinstance(self, Const) and self.value == other
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    @property
    def key(self):
        return self._key

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, mul(-1, other))

    def __rsub__(self, other):
        return add(other, mul(-1, self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return mul(self, power(other, -1))

    def __rtruediv__(self, other):
        return mul(other, power(self, -1))

    def __neg__(self):
        return mul(-1, self)

    def __pow__(self, k):
        return power(self, k)

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_string(self)})"

    @property
    def is_zero(self):
        return isinstance(self, Const) and self.value == 0

    @property
    def children(self):
        return ()

    @property
    def atoms(self):
        """Leaf atoms (symbols and function atoms) of the expression."""
        if self._atoms is None:
            if isinstance(self, (Symbol, FuncAtom)):
                self._atoms = frozenset((self,))
            else:
                found = set()
                for child in self.children:
                    found |= child.atoms
                self._atoms = frozenset(found)
        return self._atoms

    @property
    def free_symbols(self):
        """Names the expression depends on; function atoms contribute their arguments."""
        if self._names is None:
            names = set()
            for atom in self.atoms:
                if isinstance(atom, Symbol):
                    names.add(atom.name)
                else:
                    names.update(atom.args)
            self._names = frozenset(names)
        return self._names


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value
        key = (RANK_CONST, value)
        super().__init__(key, hash(key))


class Symbol(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        key = (RANK_SYMBOL, name)
        super().__init__(key, hash(key))


class FuncAtom(Expr):
    """Arbitrary function atom name(args) with a sorted derivative multi-index."""
    __slots__ = ("name", "args", "index")

    def __init__(self, name, args, index):
        self.name = name
        self.args = args
        self.index = index
        key = (RANK_FUNC, name, len(index), index, args)
        super().__init__(key, hash(key))


class Power(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        self.base = base
        self.exp = exp
        super().__init__((RANK_POWER, base._key, exp), hash((RANK_POWER, base._hash, exp)))

    @property
    def children(self):
        return (self.base,)


class Exp(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg
        super().__init__((RANK_EXP, arg._key), hash((RANK_EXP, arg._hash)))

    @property
    def children(self):
        return (self.arg,)


class Log(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg
        super().__init__((RANK_LOG, arg._key), hash((RANK_LOG, arg._hash)))

    @property
    def children(self):
        return (self.arg,)


class Product(Expr):
    __slots__ = ("coeff", "factors")

    def __init__(self, coeff, factors):
        self.coeff = coeff
        self.factors = factors
        key = (RANK_PRODUCT, tuple(f._key for f in factors), coeff)
        super().__init__(key, hash((RANK_PRODUCT, tuple(f._hash for f in factors), coeff)))

    @property
    def children(self):
        return self.factors


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = terms
        key = (RANK_SUM, tuple(t._key for t in terms))
        super().__init__(key, hash((RANK_SUM, tuple(t._hash for t in terms))))

    @property
    def children(self):
        return self.terms


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
MINUS_ONE = Const(Fraction(-1))


def sort_key(e):
    return e._key


def const(value):
    value = Fraction(value)
    if value == 0:
        return ZERO
    if value == 1:
        return ONE
    return Const(value)


def symbol(name):
    return Symbol(name)


def func(name, args, index=()):
    """Function atom name(args) differentiated along index.

    Raises DependencyError when the index mentions a symbol outside args.
    """
    args = tuple(args)
    for sym in index:
        if sym not in args:
            raise DependencyError(f"{name}({','.join(args)}) has no argument {sym}")
    order = {a: i for i, a in enumerate(args)}
    return FuncAtom(name, args, tuple(sorted(index, key=order.__getitem__)))


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return const(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


def _make_sum(terms):
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=sort_key)
    return Sum(tuple(terms))


def _make_product(coeff, factors):
    if coeff == 0:
        return ZERO
    if not factors:
        return const(coeff)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    return Product(coeff, tuple(sorted(factors, key=sort_key)))


def add(*args):
    constant = Fraction(0)
    coeffs = {}
    for arg in args:
        arg = as_expr(arg)
        for term in (arg.terms if isinstance(arg, Sum) else (arg,)):
            if isinstance(term, Const):
                constant += term.value
            elif isinstance(term, Product):
                coeffs[term.factors] = coeffs.get(term.factors, 0) + term.coeff
            else:
                coeffs[(term,)] = coeffs.get((term,), 0) + 1
    terms = [_make_product(c, list(factors)) for factors, c in coeffs.items() if c != 0]
    if constant != 0:
        terms.append(Const(constant))
    return _make_sum(terms)


def mul(*args):
    coeff = Fraction(1)
    powers = {}
    exp_args = []
    sums = []
    for arg in args:
        arg = as_expr(arg)
        if isinstance(arg, Product):
            coeff *= arg.coeff
            factors = arg.factors
        else:
            factors = (arg,)
        for f in factors:
            if isinstance(f, Const):
                coeff *= f.value
            elif isinstance(f, Exp):
                exp_args.append(f.arg)
            elif isinstance(f, Power):
                powers[f.base] = powers.get(f.base, 0) + f.exp
            elif isinstance(f, Sum):
                sums.append(f)
            else:
                powers[f] = powers.get(f, 0) + 1
    if coeff == 0:
        return ZERO

    # a sum that is already present as a power base joins it instead of being expanded
    distribute = []
    for s in sums:
        if s in powers:
            powers[s] += 1
        else:
            distribute.append(s)

    factors = []
    pending = []
    for base, k in powers.items():
        if k == 0:
            continue
        if k == 1 and not isinstance(base, (Sum, Product, Const)):
            factors.append(base)
            continue
        p = power(base, k)
        if isinstance(p, Const):
            coeff *= p.value
        elif isinstance(p, Sum):
            distribute.append(p)
        elif isinstance(p, (Product, Exp)):
            pending.append(p)
        else:
            factors.append(p)
    if exp_args:
        e = exp(add(*exp_args))
        if isinstance(e, Exp):
            factors.append(e)
        else:
            pending.append(e)

    core = _make_product(coeff, factors)
    if pending:
        core = mul(core, *pending)
    if not distribute:
        return core
    partial = [core]
    for s in distribute:
        partial = [mul(a, t) for a in partial for t in s.terms]
    return add(*partial)


def neg(e):
    return mul(-1, e)


def sub(a, b):
    return add(a, mul(-1, b))


def div(a, b):
    return mul(a, power(b, -1))


def _iroot(n, d):
    """Integer d-th root of n >= 0, rounded down."""
    if n < 2:
        return n
    x = 1 << (n.bit_length() // d + 1)
    while True:
        y = ((d - 1) * x + n // x ** (d - 1)) // d
        if y >= x:
            break
        x = y
    while x ** d > n:
        x -= 1
    while (x + 1) ** d <= n:
        x += 1
    return x


def _extract_root(n, d):
    """Split n = outer**d * inner with inner free of small d-th powers."""
    r = _iroot(n, d)
    if r ** d == n:
        return r, 1
    outer, inner = 1, n
    p = 2
    while p < 1000 and p ** d <= inner:
        while inner % p ** d == 0:
            inner //= p ** d
            outer *= p
        p += 1
    return outer, inner


def _const_power(value, k):
    if k.denominator == 1:
        if value == 0 and k < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return const(value ** int(k))
    if value == 0:
        return ZERO
    if value < 0:
        return Power(Const(value), k)
    coeff = Fraction(1)
    factors = []
    for n, e in ((value.numerator, k), (value.denominator, -k)):
        if n == 1:
            continue
        outer, inner = _extract_root(n, e.denominator)
        coeff *= Fraction(outer) ** e.numerator
        if inner != 1:
            whole = math.floor(e)
            coeff *= Fraction(inner) ** whole
            if e - whole:
                factors.append(Power(Const(Fraction(inner)), e - whole))
    return _make_product(coeff, factors)


def is_positive(e, positive=frozenset()):
    """True when e is provably positive given the names in positive."""
    if isinstance(e, Const):
        return e.value > 0
    if isinstance(e, Symbol):
        return e.name in positive
    if isinstance(e, FuncAtom):
        return not e.index and e.name in positive
    if isinstance(e, Exp):
        return True
    if isinstance(e, Power):
        return is_positive(e.base, positive)
    if isinstance(e, Product):
        return e.coeff > 0 and all(is_positive(f, positive) for f in e.factors)
    if isinstance(e, Sum):
        return all(is_positive(t, positive) for t in e.terms)
    return False


def power(base, k, positive=frozenset()):
    base = as_expr(base)
    k = Fraction(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        return _const_power(base.value, k)
    if isinstance(base, Exp):
        return exp(mul(k, base.arg))
    if isinstance(base, Power):
        if k.denominator == 1 or is_positive(base.base, positive):
            return power(base.base, base.exp * k, positive)
        return Power(base, k)
    if isinstance(base, Product):
        if k.denominator == 1:
            return mul(_const_power(base.coeff, k), *[power(f, k, positive) for f in base.factors])
        outer = [f for f in base.factors if is_positive(f, positive)]
        inner = [f for f in base.factors if not is_positive(f, positive)]
        pieces = [power(f, k, positive) for f in outer]
        if base.coeff > 0:
            pieces.append(_const_power(base.coeff, k))
            rest = _make_product(Fraction(1), inner)
        else:
            rest = _make_product(base.coeff, inner)
        if rest != ONE:
            pieces.append(Power(rest, k) if isinstance(rest, Product) else power(rest, k, positive))
        return mul(*pieces)
    if isinstance(base, Sum):
        if k.denominator == 1 and k > 0:
            result = base
            for _ in range(int(k) - 1):
                result = mul(result, base)
            return result
        return Power(base, k)
    return Power(base, k)


def exp(arg):
    arg = as_expr(arg)
    if arg.is_zero:
        return ONE
    pulled = []
    kept = []
    for term in (arg.terms if isinstance(arg, Sum) else (arg,)):
        if isinstance(term, Log):
            pulled.append(term.arg)
        elif isinstance(term, Product) and len(term.factors) == 1 and isinstance(term.factors[0], Log):
            pulled.append(power(term.factors[0].arg, term.coeff))
        else:
            kept.append(term)
    if pulled:
        return mul(exp(add(*kept)), *pulled)
    return Exp(arg)


def log(arg):
    arg = as_expr(arg)
    if arg == ONE:
        return ZERO
    if isinstance(arg, Const) and arg.value <= 0:
        raise ValueError(f"log of non-positive constant {arg}")
    if isinstance(arg, Exp):
        return arg.arg
    return Log(arg)


def differentiate(e, sym):
    """Partial derivative of e with respect to the symbol sym (name or Symbol)."""
    name = sym.name if isinstance(sym, Symbol) else sym
    if name not in e.free_symbols:
        return ZERO
    if isinstance(e, Symbol):
        return ONE if e.name == name else ZERO
    if isinstance(e, FuncAtom):
        return FuncAtom(e.name, e.args, _sorted_index(e, e.index + (name,)))
    if isinstance(e, Sum):
        return add(*[differentiate(t, name) for t in e.terms])
    if isinstance(e, Product):
        terms = []
        for i, f in enumerate(e.factors):
            if name not in f.free_symbols:
                continue
            others = e.factors[:i] + e.factors[i + 1:]
            terms.append(mul(e.coeff, differentiate(f, name), *others))
        return add(*terms)
    if isinstance(e, Power):
        return mul(e.exp, power(e.base, e.exp - 1), differentiate(e.base, name))
    if isinstance(e, Exp):
        return mul(e, differentiate(e.arg, name))
    if isinstance(e, Log):
        return mul(differentiate(e.arg, name), power(e.arg, -1))
    return ZERO


def _sorted_index(atom, index):
    order = {a: i for i, a in enumerate(atom.args)}
    return tuple(sorted(index, key=order.__getitem__))


def _rebuild(e, leaf, positive, touched=None):
    if touched is not None and not (e.atoms & touched):
        return e
    if isinstance(e, (Symbol, FuncAtom)):
        return leaf(e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Power):
        return power(_rebuild(e.base, leaf, positive, touched), e.exp, positive)
    if isinstance(e, Exp):
        return exp(_rebuild(e.arg, leaf, positive, touched))
    if isinstance(e, Log):
        return log(_rebuild(e.arg, leaf, positive, touched))
    if isinstance(e, Product):
        return mul(e.coeff, *[_rebuild(f, leaf, positive, touched) for f in e.factors])
    return add(*[_rebuild(t, leaf, positive, touched) for t in e.terms])


def canonicalize(e, positive=frozenset()):
    """Rebuild e bottom-up; with positive names, radicals of those bases simplify."""
    return _rebuild(as_expr(e), lambda a: a, frozenset(positive))


def substitute(e, target, replacement, positive=frozenset()):
    if not isinstance(target, (Symbol, FuncAtom)):
        raise SubstitutionError(f"only atoms can be substituted, got {target}")
    return substitute_many(e, {target: replacement}, positive)


def substitute_many(e, mapping, positive=frozenset()):
    """Simultaneous substitution of atoms."""
    for target in mapping:
        if not isinstance(target, (Symbol, FuncAtom)):
            raise SubstitutionError(f"only atoms can be substituted, got {target}")
    mapping = {t: as_expr(r) for t, r in mapping.items()}
    positive = frozenset(positive)
    touched = None if positive else frozenset(mapping)
    return _rebuild(as_expr(e), lambda a: mapping.get(a, a), positive, touched)


def substitute_function(e, name, replacement):
    """Replace every atom name_J by the J-th derivative of replacement."""
    cache = {}

    def leaf(atom):
        if not isinstance(atom, FuncAtom) or atom.name != name:
            return atom
        if atom.index not in cache:
            value = replacement
            for sym in atom.index:
                value = differentiate(value, sym)
            cache[atom.index] = value
        return cache[atom.index]

    touched = frozenset(a for a in e.atoms if isinstance(a, FuncAtom) and a.name == name)
    if not touched:
        return e
    return _rebuild(e, leaf, frozenset(), touched)


def find(e, cls):
    """All distinct subexpressions of e that are instances of cls."""
    found = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, cls):
            found.add(node)
        stack.extend(node.children)
    return found


def contains(e, target):
    if target in e.atoms:
        return True
    return bool(find(e, type(target)) & {target})


def split_coeff(term):
    """Return (rational coefficient, remaining canonical factor) of a term."""
    if isinstance(term, Const):
        return term.value, ONE
    if isinstance(term, Product):
        return term.coeff, _make_product(Fraction(1), list(term.factors))
    return Fraction(1), term


def terms_of(e):
    return e.terms if isinstance(e, Sum) else (() if e.is_zero else (e,))


def factors_of(e):
    if isinstance(e, Product):
        return e.coeff, e.factors
    if isinstance(e, Const):
        return e.value, ()
    return Fraction(1), (e,)


def collect(e, atoms):
    """Group e by monomials in atoms.

    Returns a dict monomial -> coefficient, where monomials are products of
    rational powers of the atoms (ONE for the atom-free part) and coefficients
    are free of every atom. Raises NonPolynomialError otherwise.
    """
    atoms = frozenset(atoms)
    leaves = frozenset(a for a in atoms if isinstance(a, (Symbol, FuncAtom)))
    grouped = {}
    for term in terms_of(as_expr(e)):
        coeff, factors = factors_of(term)
        mono = []
        rest = []
        for f in factors:
            if f in atoms:
                mono.append((f, Fraction(1)))
            elif isinstance(f, Power) and f.base in atoms:
                mono.append((f.base, f.exp))
            elif f.atoms & leaves:
                raise NonPolynomialError(f"{f} is not polynomial in the collected atoms")
            else:
                rest.append(f)
        grouped.setdefault(tuple(mono), []).append(_make_product(coeff, rest))
    result = {}
    for mono, coeffs in grouped.items():
        value = add(*coeffs)
        if not value.is_zero:
            result[mul(*[power(a, k) for a, k in mono]) if mono else ONE] = value
    return result


def is_constant(e):
    return not e.atoms and not find(e, Log)


def evaluate(e, point, positive=frozenset()):
    """Substitute exact values for atoms; exponentials and logs stay formal."""
    return substitute_many(e, {a: const(v) for a, v in point.items()}, positive)


def random_point(exprs, rng, exclude=(), low=1, high=97):
    """Random nonzero rationals for every atom of exprs not in exclude."""
    point = {}
    exclude = set(exclude)
    for e in exprs:
        for atom in sorted(e.atoms, key=sort_key):
            if atom in exclude or atom in point:
                continue
            point[atom] = random_rational(rng, low, high)
    return point


def _fraction_str(value):
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _base_str(e):
    if isinstance(e, (Sum, Product, Power)):
        return f"({to_string(e)})"
    if isinstance(e, Const) and (e.value < 0 or e.value.denominator != 1):
        return f"({to_string(e)})"
    return to_string(e)


def to_string(e):
    if isinstance(e, Const):
        return _fraction_str(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, FuncAtom):
        return e.name + ("_" + "".join(e.index) if e.index else "")
    if isinstance(e, Power):
        if e.exp.denominator == 1 and e.exp > 0:
            return f"{_base_str(e.base)}^{e.exp.numerator}"
        return f"{_base_str(e.base)}^({_fraction_str(e.exp)})"
    if isinstance(e, Exp):
        return f"exp({to_string(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_string(e.arg)})"
    if isinstance(e, Product):
        body = "*".join(to_string(f) for f in e.factors)
        if e.coeff == 1:
            return body
        if e.coeff == -1:
            return "-" + body
        return f"{_fraction_str(e.coeff)}*{body}"
    out = to_string(e.terms[0])
    for term in e.terms[1:]:
        if _is_negative(term):
            out += " - " + to_string(neg(term))
        else:
            out += " + " + to_string(term)
    return out


def _is_negative(term):
    if isinstance(term, Const):
        return term.value < 0
    if isinstance(term, Product):
        return term.coeff < 0
    return False
