"""Exact arithmetic in free nilpotent Lie algebras.

Elements are coordinate vectors over ``Fraction`` in a Hall basis.  The
universal BCH and Zassenhaus polynomials are computed once per step by
series manipulation in the truncated free associative algebra on two
letters and projected onto the two-generator Hall basis; they are then
evaluated in any target algebra by iterated brackets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from ._rational import ExactSolver, Q, fmt_q, rational_root
from .errors import ResourceError, UsageError

MAX_STEP = 6
MAX_GENERATORS = 4
MAX_DIMENSION = 120


def mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def witt_dimension(k: int, m: int) -> int:
    """Dimension of the degree-m part of the free Lie algebra on k letters."""
    total = sum(mobius(d) * k ** (m // d) for d in range(1, m + 1) if m % d == 0)
    return total // m


# -- free associative algebra, truncated -------------------------------------

def _amul(p, q, s):
    out = {}
    for w1, c1 in p.items():
        for w2, c2 in q.items():
            if len(w1) + len(w2) > s:
                continue
            w = w1 + w2
            out[w] = out.get(w, 0) + c1 * c2
    return {w: c for w, c in out.items() if c}


def _aadd(p, q, a=1, b=1):
    out = {w: a * c for w, c in p.items()}
    for w, c in q.items():
        out[w] = out.get(w, 0) + b * c
    return {w: c for w, c in out.items() if c}


def _aexp(p, s):
    """exp of a series without constant term, truncated at degree s."""
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for n in range(1, s + 1):
        power = _amul(power, p, s)
        if not power:
            break
        out = _aadd(out, power, 1, Fraction(1, factorial(n)))
    return out


def _alog(p, s):
    """log of a series with constant term 1, truncated at degree s."""
    w = {k: v for k, v in p.items() if k != ()}
    out, power = {}, {(): Fraction(1)}
    for n in range(1, s + 1):
        power = _amul(power, w, s)
        if not power:
            break
        out = _aadd(out, power, 1, Fraction((-1) ** (n + 1), n))
    return out


def _homogeneous(p, m):
    return {w: c for w, c in p.items() if len(w) == m}


# -- Hall basis ---------------------------------------------------------------

@dataclass(frozen=True)
class HallElement:
    index: int
    degree: int
    left: int | None = None
    right: int | None = None
    generator: int | None = None


class HallBasis:
    """Hall basis of the free step-``s`` nilpotent Lie algebra on ``k`` generators.

    Basic brackets are ``[a, b]`` with ``a < b`` in basis order and, when
    ``b = [b1, b2]``, ``b1 <= a``.  Order is by degree, then by the order of
    the left factor, then the right factor.
    """

    def __init__(self, k: int, s: int, names: Sequence[str] | None = None):
        self.k, self.s = k, s
        if names is None:
            names = ("X", "Y", "Z", "W")[:k] if k <= 4 else tuple(f"x{i+1}" for i in range(k))
        self.names = tuple(names)
        self.elements: list[HallElement] = []
        by_degree: dict[int, list[int]] = {}
        for g in range(k):
            self.elements.append(HallElement(g, 1, generator=g))
            by_degree.setdefault(1, []).append(g)
        for m in range(2, s + 1):
            new = []
            for a in range(len(self.elements)):
                da = self.elements[a].degree
                if da >= m:
                    continue
                for b in by_degree.get(m - da, []):
                    if not a < b:
                        continue
                    eb = self.elements[b]
                    if eb.left is not None and not eb.left <= a:
                        continue
                    new.append((a, b))
            for a, b in new:
                self.elements.append(HallElement(len(self.elements), m, a, b))
                by_degree.setdefault(m, []).append(len(self.elements) - 1)
        self.dim = len(self.elements)
        self.degrees = tuple(e.degree for e in self.elements)
        self.by_degree = {m: tuple(v) for m, v in by_degree.items()}
        self.expansions = []
        for e in self.elements:
            self.expansions.append(self._expand(e))
        self._solvers = {}
        for m, idx in self.by_degree.items():
            words = sorted({w for i in idx for w in self.expansions[i]})
            rows = [[self.expansions[i].get(w, 0) for w in words] for i in idx]
            self._solvers[m] = (idx, words, ExactSolver(rows))
        self.table = self._structure_table()

    @property
    def basis_id(self) -> str:
        return f"free-k{self.k}-s{self.s}"

    def _expand(self, e: HallElement):
        if e.generator is not None:
            return {(e.generator,): 1}
        a, b = self.expansions[e.left], self.expansions[e.right]
        return _aadd(_amul(a, b, self.s), _amul(b, a, self.s), 1, -1)

    def project(self, poly) -> tuple:
        """Hall coordinates of a Lie polynomial given in associative form."""
        coords = [Fraction(0)] * self.dim
        for m in range(1, self.s + 1):
            part = _homogeneous(poly, m)
            if not part:
                continue
            idx, words, solver = self._solvers[m]
            wset = set(words)
            if any(w not in wset for w in part):
                raise UsageError("polynomial is not a Lie element")
            x = solver.solve([part.get(w, 0) for w in words])
            for i, c in zip(idx, x):
                coords[i] = c
        if any(len(w) > self.s or len(w) == 0 for w in poly):
            raise UsageError("polynomial has terms outside degrees 1..s")
        return tuple(coords)

    def _structure_table(self):
        table = {}
        for i in range(self.dim):
            for j in range(self.dim):
                if i == j or self.degrees[i] + self.degrees[j] > self.s:
                    continue
                if (j, i) in table:
                    table[(i, j)] = tuple((t, -c) for t, c in table[(j, i)])
                    continue
                a, b = self.expansions[i], self.expansions[j]
                comm = _aadd(_amul(a, b, self.s), _amul(b, a, self.s), 1, -1)
                coords = self.project(comm)
                table[(i, j)] = tuple((t, c) for t, c in enumerate(coords) if c)
        return table

    def tree(self, i: int) -> str:
        e = self.elements[i]
        if e.generator is not None:
            return self.names[e.generator]
        return f"[{self.tree(e.left)},{self.tree(e.right)}]"

    def dims_by_degree(self):
        return [len(self.by_degree.get(m, ())) for m in range(1, self.s + 1)]

    def homogeneous_dimension(self) -> int:
        return sum(self.degrees)

    def element(self, coords) -> "LieElement":
        coords = tuple(Q(c) for c in coords)
        if len(coords) != self.dim:
            raise UsageError(f"expected {self.dim} coordinates for {self.basis_id}, got {len(coords)}")
        return LieElement(self, coords)

    def zero(self) -> "LieElement":
        return LieElement(self, (Fraction(0),) * self.dim)

    def generator(self, g: int) -> "LieElement":
        c = [Fraction(0)] * self.dim
        c[g] = Fraction(1)
        return LieElement(self, tuple(c))

    def basis_vector(self, i: int) -> "LieElement":
        c = [Fraction(0)] * self.dim
        c[i] = Fraction(1)
        return LieElement(self, tuple(c))

    def __repr__(self):
        return f"HallBasis(k={self.k}, s={self.s}, dim={self.dim})"


def build_hall_basis(k: int, s: int, *, max_step=MAX_STEP, max_generators=MAX_GENERATORS,
                     max_dimension=MAX_DIMENSION) -> HallBasis:
    if k < 1 or s < 1:
        raise UsageError("need k >= 1 and s >= 1")
    if s > max_step:
        raise ResourceError(f"step s={s} exceeds ceiling {max_step}", budget=max_step)
    if k > max_generators:
        raise ResourceError(f"generator count k={k} exceeds ceiling {max_generators}", budget=max_generators)
    dim = sum(witt_dimension(k, m) for m in range(1, s + 1))
    if dim > max_dimension:
        raise ResourceError(f"dimension {dim} of free-k{k}-s{s} exceeds ceiling {max_dimension}",
                            budget=max_dimension)
    return _cached_basis(k, s)


@lru_cache(maxsize=None)
def _cached_basis(k, s):
    return HallBasis(k, s)


def basis_from_id(basis_id: str) -> HallBasis:
    try:
        _, ks, ss = basis_id.split("-")
        return build_hall_basis(int(ks[1:]), int(ss[1:]))
    except (ValueError, IndexError):
        raise UsageError(f"unknown basis id {basis_id!r}")


# -- elements -----------------------------------------------------------------

@dataclass(frozen=True)
class LieElement:
    basis: HallBasis = field(repr=False, compare=False)
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "_bid", self.basis.basis_id)

    def __eq__(self, other):
        return isinstance(other, LieElement) and self._bid == other._bid and self.coords == other.coords

    def __hash__(self):
        return hash((self._bid, self.coords))

    def _check(self, other):
        if not isinstance(other, LieElement):
            raise UsageError(f"expected LieElement, got {type(other).__name__}")
        if self._bid != other._bid:
            raise UsageError(f"basis mismatch: {self._bid} vs {other._bid}")

    def __add__(self, other):
        self._check(other)
        return LieElement(self.basis, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return LieElement(self.basis, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return LieElement(self.basis, tuple(-a for a in self.coords))

    def __mul__(self, c):
        c = Q(c)
        return LieElement(self.basis, tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.coords)

    def part(self, m: int) -> "LieElement":
        """Degree-m component."""
        return LieElement(self.basis, tuple(c if d == m else Fraction(0)
                                            for c, d in zip(self.coords, self.basis.degrees)))

    def graded_parts(self):
        return [self.part(m) for m in range(1, self.basis.s + 1)]

    def __repr__(self):
        return f"LieElement({self._bid}, ({', '.join(fmt_q(c) for c in self.coords)}))"


def bracket(X: LieElement, Y: LieElement) -> LieElement:
    X._check(Y)
    B = X.basis
    out = [Fraction(0)] * B.dim
    table = B.table
    xs = [(i, c) for i, c in enumerate(X.coords) if c]
    ys = [(j, c) for j, c in enumerate(Y.coords) if c]
    for i, a in xs:
        for j, b in ys:
            entry = table.get((i, j))
            if not entry:
                continue
            ab = a * b
            for t, c in entry:
                out[t] += ab * c
    return LieElement(B, tuple(out))


# -- universal BCH / Zassenhaus polynomials -----------------------------------

@dataclass(frozen=True)
class LiePolynomialTerm:
    coefficient: Fraction
    monomial: str
    degree: int
    index: int  # position in the two-generator Hall basis used for evaluation

    def __str__(self):
        return f"{fmt_q(self.coefficient)}*{self.monomial}"


@lru_cache(maxsize=None)
def bch_coefficients(s: int) -> tuple:
    """Coordinates of log(e^X e^Y) in the two-generator Hall basis of step s."""
    B2 = build_hall_basis(2, s)
    x, y = {(0,): Fraction(1)}, {(1,): Fraction(1)}
    z = _alog(_amul(_aexp(x, s), _aexp(y, s), s), s)
    return B2.project(z)


@lru_cache(maxsize=None)
def _zassenhaus_coords(s: int) -> tuple:
    B2 = build_hall_basis(2, s)
    x, y = {(0,): Fraction(1)}, {(1,): Fraction(1)}
    w = _amul(_amul(_aexp(_aadd(y, {}, -1), s), _aexp(_aadd(x, {}, -1), s), s),
              _aexp(_aadd(x, y), s), s)
    out = []
    for n in range(2, s + 1):
        c_n = _homogeneous(_alog(w, s), n)
        out.append(B2.project(c_n))
        w = _amul(_aexp(_aadd(c_n, {}, -1), s), w, s)
    return tuple(out)


def zassenhaus_terms(s: int) -> list[list[LiePolynomialTerm]]:
    """Zassenhaus polynomials of degrees 2..s as term lists.

    ``exp(X+Y) = exp(X) exp(Y) exp(L_2(X,Y)) ... exp(L_s(X,Y))``.
    """
    if s < 1:
        raise UsageError("step must be >= 1")
    if s == 1:
        return []
    B2 = build_hall_basis(2, s)
    groups = []
    for coords in _zassenhaus_coords(s):
        groups.append([LiePolynomialTerm(c, B2.tree(i), B2.degrees[i], i)
                       for i, c in enumerate(coords) if c])
    return groups


def _evaluate_two_generator(coords, X: LieElement, Y: LieElement, s: int) -> LieElement:
    """Substitute X, Y for the generators of the two-generator Hall basis."""
    B2 = build_hall_basis(2, s)
    values: dict[int, LieElement] = {}

    def val(i):
        if i in values:
            return values[i]
        e = B2.elements[i]
        if e.generator is not None:
            v = X if e.generator == 0 else Y
        else:
            v = bracket(val(e.left), val(e.right))
        values[i] = v
        return v

    out = X.basis.zero()
    acc = list(out.coords)
    for i, c in enumerate(coords):
        if c:
            v = val(i)
            for t, a in enumerate(v.coords):
                if a:
                    acc[t] += c * a
    return LieElement(X.basis, tuple(acc))


def evaluate_terms(terms: Sequence[LiePolynomialTerm], X: LieElement, Y: LieElement) -> LieElement:
    X._check(Y)
    s = max((t.degree for t in terms), default=1)
    coords = [Fraction(0)] * build_hall_basis(2, max(s, 1)).dim
    for t in terms:
        coords[t.index] += t.coefficient
    return _evaluate_two_generator(coords, X, Y, max(s, 1))


def bch(X: LieElement, Y: LieElement) -> LieElement:
    """BCH product X ⋄ Y = log(e^X e^Y), exact in the step-s algebra."""
    X._check(Y)
    s = X.basis.s
    return _evaluate_two_generator(bch_coefficients(s), X, Y, s)


def bch_many(*elems: LieElement) -> LieElement:
    out = elems[0]
    for e in elems[1:]:
        out = bch(out, e)
    return out


def group_commutator(X: LieElement, Y: LieElement) -> LieElement:
    """log(e^X e^Y e^-X e^-Y)."""
    return bch_many(X, Y, -X, -Y)


def zassenhaus_product(X: LieElement, Y: LieElement) -> LieElement:
    """Right-hand side of the Zassenhaus identity, multiplied out with ⋄."""
    out = bch(X, Y)
    for group in zassenhaus_terms(X.basis.s):
        out = bch(out, evaluate_terms(group, X, Y))
    return out


def dilate(lam, X: LieElement) -> LieElement:
    lam = Q(lam)
    if lam <= 0:
        raise UsageError(f"dilation factor must be positive, got {lam}")
    return LieElement(X.basis, tuple(c * lam**d for c, d in zip(X.coords, X.basis.degrees)))


def _degree_sup(X: LieElement):
    sup = {}
    for c, d in zip(X.coords, X.basis.degrees):
        sup[d] = max(sup.get(d, Fraction(0)), abs(c))
    return sup


def pnorm_le(X: LieElement, lam) -> bool:
    """Exact test of max_i ||X_i||^(1/i) <= lam, as ||X_i|| <= lam^i."""
    lam = Q(lam)
    if lam < 0:
        return False
    return all(v <= lam**d for d, v in _degree_sup(X).items())


def pnorm(X: LieElement) -> float:
    """Homogeneous quasi-norm max_i ||X_i||_inf^(1/i) over Hall coordinates."""
    best = 0.0
    for d, v in _degree_sup(X).items():
        r = rational_root(v, d)
        best = max(best, float(r) if r is not None else float(v) ** (1.0 / d))
    return best


# -- Heisenberg model ---------------------------------------------------------

def heisenberg_algebra() -> HallBasis:
    """The Heisenberg Lie algebra: Hall basis (X, Y, [X,Y]) with coordinates (a, b, c)."""
    return build_hall_basis(2, 2)


def heisenberg_element(a, b, c) -> LieElement:
    return heisenberg_algebra().element((a, b, c))


def _matrix(M):
    try:
        rows = [[Q(x) for x in r] for r in M]
    except TypeError:
        raise UsageError("matrix must be a 3x3 nested sequence")
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise UsageError("expected a 3x3 matrix")
    return rows


def _mm(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(3)), Fraction(0)) for j in range(3)] for i in range(3)]


def _freeze(M):
    return tuple(tuple(r) for r in M)


def lie_matrix(X: LieElement):
    a, b, c = X.coords
    z = Fraction(0)
    return ((z, a, c), (z, z, b), (z, z, z))


def heisenberg_exp(M):
    """Matrix exponential I + M + M^2/2 of a strictly upper triangular 3x3 matrix."""
    M = _matrix(M)
    if any(M[i][j] for i in range(3) for j in range(3) if j <= i):
        raise UsageError("heisenberg_exp needs a strictly upper triangular matrix")
    M2 = _mm(M, M)
    return _freeze([[int(i == j) + M[i][j] + M2[i][j] / 2 for j in range(3)] for i in range(3)])


def heisenberg_log(g):
    """Matrix logarithm N - N^2/2 of a unipotent upper triangular 3x3 matrix."""
    g = _matrix(g)
    if any(g[i][j] != int(i == j) for i in range(3) for j in range(3) if j <= i):
        raise UsageError("heisenberg_log needs a unipotent upper triangular matrix")
    N = [[g[i][j] - int(i == j) for j in range(3)] for i in range(3)]
    N2 = _mm(N, N)
    return _freeze([[N[i][j] - N2[i][j] / 2 for j in range(3)] for i in range(3)])


def element_from_lie_matrix(M) -> LieElement:
    M = _matrix(M)
    return heisenberg_element(M[0][1], M[1][2], M[0][2])


def matmul(A, B):
    return _freeze(_mm(_matrix(A), _matrix(B)))


# -- serialization -----------------------------------------------------------

def element_to_json(X: LieElement) -> dict:
    return {"basis_id": X.basis.basis_id, "coords": [fmt_q(c) for c in X.coords]}


def element_from_json(data) -> LieElement:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        B = basis_from_id(data["basis_id"])
        return B.element(Fraction(c) for c in data["coords"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"malformed LieElement JSON: {exc}")


def basis_table_rows(B: HallBasis):
    """Rows (index, degree, tree, brackets) documenting a Hall basis."""
    rows = []
    for i in range(B.dim):
        parts = []
        for j in range(B.dim):
            entry = B.table.get((i, j))
            if entry:
                rhs = " + ".join(f"{fmt_q(c)}*e{t}" for t, c in entry)
                parts.append(f"[e{i},e{j}]={rhs}")
        rows.append({"index": i, "degree": B.degrees[i], "tree": B.tree(i), "brackets": "; ".join(parts)})
    return rows
