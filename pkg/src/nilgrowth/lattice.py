"""Exact rational lattices in canonical Hermite normal form."""

from __future__ import annotations

import math
from fractions import Fraction

from ._rational import Q, common_denominator, det, fmt_q, rank, rational_root
from .errors import UsageError


def hnf(rows, ncols=None):
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, pivots): nonzero rows only, pivots positive, entries above a
    pivot reduced into [0, pivot).
    """
    A = [list(r) for r in rows if any(r)]
    if ncols is None:
        ncols = len(A[0]) if A else 0
    H, pivots, _ = _hnf_core(A, ncols)
    return H, pivots


def hnf_with_kernel(rows, ncols):
    """HNF of ``rows`` plus a basis of their integer left kernel."""
    m = len(rows)
    A = [list(r) + [int(i == j) for j in range(m)] for i, r in enumerate(rows)]
    H, pivots, rest = _hnf_core(A, ncols)
    return [r[:ncols] for r in H], pivots, [r[ncols:] for r in rest]


def _hnf_core(A, ncols):
    m = len(A)
    r = 0
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            pr = A[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // pr[c]
                    A[i] = [x - q * y for x, y in zip(A[i], pr)]
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if r >= m or A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        pr = A[r]
        for i in range(r):
            q = A[i][c] // pr[c]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], pr)]
        pivots.append(c)
        r += 1
    return A[:r], pivots, A[r:]


class IntegerLattice:
    """Additive subgroup of Q^d, stored as the HNF of D·Λ with minimal D."""

    __slots__ = ("ambient_dim", "basis", "denominator", "pivots")

    def __init__(self, ambient_dim, basis, denominator=1, pivots=None):
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(r) for r in basis)
        self.denominator = denominator
        if pivots is None:
            pivots = [next(j for j, x in enumerate(r) if x) for r in self.basis]
        self.pivots = tuple(pivots)

    @classmethod
    def from_integer_rows(cls, d, rows, D=1):
        H, piv = hnf(rows, d)
        g = D
        for r in H:
            for x in r:
                g = math.gcd(g, x)
        if g > 1:
            H = [[x // g for x in r] for r in H]
            D //= g
        return cls(d, H, D, piv)

    @property
    def rank(self):
        return len(self.basis)

    def __eq__(self, other):
        return (isinstance(other, IntegerLattice) and self.ambient_dim == other.ambient_dim
                and self.denominator == other.denominator and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, self.denominator, self.basis))

    def __repr__(self):
        rows = ", ".join("(" + ",".join(fmt_q(x) for x in r) + ")" for r in self.rational_basis())
        return f"IntegerLattice(d={self.ambient_dim}, basis=[{rows}])"

    def rational_basis(self):
        D = self.denominator
        return [tuple(Fraction(x, D) for x in r) for r in self.basis]

    def coordinates(self, v):
        """Integer coefficients of v in the canonical basis, or None if v is not in the lattice."""
        v = [Q(x) for x in v]
        if len(v) != self.ambient_dim:
            raise UsageError(f"vector of dimension {len(v)} vs lattice dimension {self.ambient_dim}")
        w = []
        for x in v:
            y = x * self.denominator
            if y.denominator != 1:
                return None
            w.append(y.numerator)
        coeffs = []
        for row, p in zip(self.basis, self.pivots):
            if w[p] % row[p]:
                return None
            c = w[p] // row[p]
            if c:
                w = [a - c * b for a, b in zip(w, row)]
            coeffs.append(c)
        if any(w):
            return None
        return coeffs

    def contains(self, v):
        return self.coordinates(v) is not None

    __contains__ = contains

    def gram_determinant(self):
        B = self.rational_basis()
        G = [[sum(a * b for a, b in zip(u, v)) for v in B] for u in B]
        return det(G)

    def covolume_squared(self):
        if self.rank == 0:
            raise UsageError("covolume of the zero lattice is undefined")
        return self.gram_determinant()

    def covolume(self):
        """Exact covolume for full rank; for partial rank the exact root of the
        Gram determinant when it is rational, else its float value."""
        if self.rank == 0:
            raise UsageError("covolume of the zero lattice is undefined")
        if self.rank == self.ambient_dim:
            prod = 1
            for row, p in zip(self.basis, self.pivots):
                prod *= row[p]
            return Fraction(prod, self.denominator**self.ambient_dim)
        g = self.gram_determinant()
        r = rational_root(g, 2)
        return r if r is not None else math.sqrt(g)

    def scaled(self, c):
        c = Q(c)
        if c == 0:
            return zero_lattice(self.ambient_dim)
        return span_z([[c * x for x in r] for r in self.rational_basis()], self.ambient_dim)

    def join(self, other):
        _check_dims(self, other)
        return span_z(self.rational_basis() + other.rational_basis(), self.ambient_dim)

    def intersect(self, other):
        return intersect(self, other)

    def is_sublattice_of(self, other):
        return all(other.contains(v) for v in self.rational_basis())

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "denominator": self.denominator,
                "basis": [[fmt_q(x) for x in r] for r in self.rational_basis()]}

    @classmethod
    def from_json(cls, data):
        try:
            return span_z([[Fraction(x) for x in r] for r in data["basis"]], data["ambient_dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed lattice JSON: {exc}")


def _check_dims(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise UsageError(f"dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def zero_lattice(d):
    return IntegerLattice(d, [], 1, [])


def standard_lattice(d):
    return IntegerLattice(d, [[int(i == j) for j in range(d)] for i in range(d)], 1)


def span_z(vectors, d=None) -> IntegerLattice:
    """Smallest additive subgroup containing the given rational vectors."""
    vecs = [[Q(x) for x in v] for v in vectors]
    if d is None:
        if not vecs:
            raise UsageError("span_z of an empty list needs an explicit dimension")
        d = len(vecs[0])
    for v in vecs:
        if len(v) != d:
            raise UsageError(f"dimension mismatch: expected {d}, got {len(v)}")
    D = common_denominator(vecs)
    rows = [[(x * D).numerator for x in v] for v in vecs]
    return IntegerLattice.from_integer_rows(d, rows, D)


def intersect(A: IntegerLattice, B: IntegerLattice) -> IntegerLattice:
    _check_dims(A, B)
    d = A.ambient_dim
    if A.rank == 0 or B.rank == 0:
        return zero_lattice(d)
    D = A.denominator * B.denominator // math.gcd(A.denominator, B.denominator)
    ra = [[x * (D // A.denominator) for x in r] for r in A.basis]
    rb = [[x * (D // B.denominator) for x in r] for r in B.basis]
    _, _, kernel = hnf_with_kernel(ra + rb, d)
    # kernel rows (x, y) satisfy x·A + y·B = 0; the common vectors are x·A
    out = []
    for k in kernel:
        x = k[:len(ra)]
        out.append([sum(c * r[j] for c, r in zip(x, ra)) for j in range(d)])
    return IntegerLattice.from_integer_rows(d, out, D)


def index(sub: IntegerLattice, sup: IntegerLattice):
    """[sup : sub] as an int, or math.inf when the rank drops."""
    _check_dims(sub, sup)
    coords = []
    for v in sub.rational_basis():
        c = sup.coordinates(v)
        if c is None:
            raise UsageError(f"not a sublattice: witness {tuple(fmt_q(x) for x in v)} not in super")
        coords.append(c)
    if sub.rank < sup.rank:
        return math.inf
    return abs(int(det(coords)))


def lattice_rank(vectors):
    return rank(vectors) if vectors else 0
