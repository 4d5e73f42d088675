import math
import random
from fractions import Fraction

import numpy as np


def to_matrix(rows, n_cols=None):
    """Object array of Fractions, shape (len(rows), n_cols)."""
    if n_cols is None:
        n_cols = len(rows[0]) if rows else 0
    m = np.empty((len(rows), n_cols), dtype=object)
    for i, row in enumerate(rows):
        assert len(row) == n_cols, "ragged matrix"
        for j, v in enumerate(row):
            m[i, j] = Fraction(v)
    return m


def integer_rows(m):
    """Scale every row by the lcm of its denominators."""
    out = np.empty(m.shape, dtype=object)
    for i in range(m.shape[0]):
        scale = 1
        for v in m[i]:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
        for j in range(m.shape[1]):
            out[i, j] = int(m[i, j] * scale)
    return out


def bareiss_echelon(m):
    """Fraction-free row echelon form with the leftmost nonzero entry as pivot.

    Args:
        m: object array of Fractions or ints
    Returns:
        echelon: integer object array
        pivots: list of pivot columns
    """
    a = integer_rows(m)
    n_rows, n_cols = a.shape
    prev = 1
    r = 0
    pivots = []
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if a[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        pivot = a[r, c]
        for i in range(r + 1, n_rows):
            lead = a[i, c]
            for j in range(c + 1, n_cols):
                a[i, j] = (pivot * a[i, j] - lead * a[r, j]) // prev
            a[i, c] = 0
        prev = pivot
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows, n_cols=None):
    if not len(rows):
        return 0
    m = rows if isinstance(rows, np.ndarray) else to_matrix(rows, n_cols)
    if m.size == 0:
        return 0
    return len(bareiss_echelon(m)[1])


def reduced_echelon(m):
    """Reduced row echelon form over the rationals and the pivot columns."""
    a, pivots = bareiss_echelon(m)
    n_cols = a.shape[1]
    red = np.empty((len(pivots), n_cols), dtype=object)
    for i, c in enumerate(pivots):
        lead = a[i, c]
        for j in range(n_cols):
            red[i, j] = Fraction(a[i, j], lead)
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        for k in range(i):
            factor = red[k, c]
            if factor != 0:
                red[k] = red[k] - factor * red[i]
    return red, pivots


def primitive(vector):
    """Scale a rational vector to coprime integers with the first nonzero entry positive."""
    scale = 1
    for v in vector:
        v = Fraction(v)
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    ints = [int(Fraction(v) * scale) for v in vector]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return [Fraction(0)] * len(ints)
    first = next(v for v in ints if v != 0)
    sign = 1 if first > 0 else -1
    return [Fraction(sign * v // g) for v in ints]


def nullspace(rows, n_cols):
    """Basis of {v : rows . v = 0} as primitive integer vectors, one per free column."""
    if not len(rows):
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    m = rows if isinstance(rows, np.ndarray) else to_matrix(rows, n_cols)
    red, pivots = reduced_echelon(m)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i, f]
        basis.append(primitive(v))
    return basis


def solve_linear(rows, rhs, n_cols):
    """A solution of rows . v = rhs with free variables set to zero, or None if inconsistent."""
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    if not augmented:
        return [Fraction(0)] * n_cols
    red, pivots = reduced_echelon(to_matrix(augmented, n_cols + 1))
    if pivots and pivots[-1] == n_cols:
        return None
    v = [Fraction(0)] * n_cols
    for i, c in enumerate(pivots):
        v[c] = red[i, n_cols]
    return v


def make_rng(seed):
    return random.Random(seed)


def random_rational(rng, low=1, high=97, max_den=13):
    """Nonzero random rational with either sign."""
    num = rng.randint(low, high) * rng.choice((1, -1))
    return Fraction(num, rng.randint(1, max_den))
