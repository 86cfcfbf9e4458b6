"""Small exact linear-algebra helpers over ``Fraction``."""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import reduce

from .errors import UsageError

DEFAULT_POINT_BUDGET = 10**7


def point_budget(budget=None):
    """Resolve an enumeration budget; the environment overrides the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("NILGROWTH_BUDGET_POINTS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"NILGROWTH_BUDGET_POINTS is not an integer: {env!r}")
    return DEFAULT_POINT_BUDGET


def Q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise UsageError(f"refusing float {x!r} in exact arithmetic; pass a string or Fraction")
    return Fraction(x)


def qvec(v):
    return tuple(Q(x) for x in v)


def fmt_q(x) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_vec(text: str):
    try:
        return qvec(p for p in text.split(",") if p.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational vector {text!r}")


def lcm(*xs):
    return reduce(lambda a, b: a * b // math.gcd(a, b) if a and b else a or b, xs, 1)


def common_denominator(vectors):
    d = 1
    for v in vectors:
        for x in v:
            d = lcm(d, Q(x).denominator)
    return d


def det(rows):
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Q(x) for x in r] for r in rows]
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        result *= p
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f:
                ar, ac = a[r], a[c]
                for k in range(c, n):
                    ar[k] -= f * ac[k]
    return sign * result


def rank(rows):
    return len(row_echelon(rows)[1])


def row_echelon(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    a = [[Q(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


class ExactSolver:
    """Solve ``x @ M = v`` for fixed M (rows = unknowns) with exactness checks.

    Precomputes a pivot selection so repeated solves are cheap.
    """

    def __init__(self, rows):
        self.rows = [[Q(x) for x in r] for r in rows]
        self.n = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        # pivot columns of M give an invertible square submatrix
        _, piv = row_echelon(self.rows)
        if len(piv) != self.n:
            raise UsageError("rows are linearly dependent")
        self.pivots = piv
        sq = [[self.rows[i][j] for j in piv] for i in range(self.n)]
        self.inv = _inverse(sq)

    def solve(self, v, check=True):
        v = [Q(x) for x in v]
        b = [v[j] for j in self.pivots]
        x = [sum((b[k] * self.inv[k][i] for k in range(self.n)), Fraction(0)) for i in range(self.n)]
        if check:
            for j in range(self.ncols):
                s = sum((x[i] * self.rows[i][j] for i in range(self.n) if self.rows[i][j]), Fraction(0))
                if s != v[j]:
                    raise UsageError("vector is not in the row span")
        return x


def _inverse(m):
    n = len(m)
    a = [[Q(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    ech, piv = row_echelon(a)
    if piv[:n] != list(range(n)):
        raise UsageError("singular matrix")
    return [r[n:] for r in ech]


def inverse(m):
    return _inverse(m)


def integer_nth_root(x: int, n: int):
    """Floor of the n-th root of a non-negative integer."""
    if x < 0:
        raise ValueError("negative")
    if x < 2:
        return x
    r = int(round(x ** (1.0 / n)))
    while r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def rational_root(x: Fraction, n: int):
    """Exact n-th root of a non-negative rational, or None if irrational."""
    x = Q(x)
    p, q = integer_nth_root(x.numerator, n), integer_nth_root(x.denominator, n)
    if p**n == x.numerator and q**n == x.denominator:
        return Fraction(p, q)
    return None
