"""The discrete Heisenberg group H(Z).

Elements are integer triples (a, b, c) standing for the unipotent matrix
[[1, a, c], [0, 1, b], [0, 0, 1]].  Subgroups are kept in a canonical
polycyclic form, and sizes of powers of large generating sets are counted
with an interval-set dynamic programme over the (a, b) plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._rational import point_budget
from .errors import ResourceError, UsageError
from .lattice import IntegerLattice, _hnf_core, zero_lattice

IDENTITY = (0, 0, 0)
X, Y, Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def mul(g, h):
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


def inv(g):
    return (-g[0], -g[1], -g[2] + g[0] * g[1])


def power(g, n):
    a, b, c = g
    return (n * a, n * b, n * c + a * b * (n * (n - 1) // 2))


def commutator(g, h):
    """g h g^-1 h^-1, which is central with value a·y - b·x."""
    return (0, 0, g[0] * h[1] - g[1] * h[0])


def product(*gs):
    out = IDENTITY
    for g in gs:
        out = mul(out, g)
    return out


def to_matrix(g):
    a, b, c = g
    return ((1, a, c), (0, 1, b), (0, 0, 1))


def from_matrix(M):
    try:
        (r0, r1, r2) = M
        ok = (r0[0] == 1 and r1[0] == 0 and r1[1] == 1 and r2[0] == 0 and r2[1] == 0 and r2[2] == 1)
        vals = (r0[1], r1[2], r0[2])
    except (TypeError, ValueError, IndexError):
        raise UsageError("expected a 3x3 unipotent upper triangular matrix")
    if not ok or any(Fraction(v).denominator != 1 for v in vals):
        raise UsageError("expected an integer unipotent upper triangular matrix")
    return tuple(int(v) for v in vals)


def to_log(g):
    """Log coordinates (a, b, c - ab/2) in the Hall basis X, Y, [X,Y]."""
    a, b, c = g
    return (Fraction(a), Fraction(b), c - Fraction(a * b, 2))


def from_log(v):
    a, b, c = (Fraction(x) for x in v)
    g = c + a * b / 2
    if a.denominator != 1 or b.denominator != 1 or g.denominator != 1:
        return None
    return (int(a), int(b), int(g))


def word_product(word):
    """Evaluate a word given as (element, exponent) pairs."""
    out = IDENTITY
    for g, e in word:
        out = mul(out, power(g, e) if e >= 0 else power(inv(g), -e))
    return out


# -- canonical subgroup form ---------------------------------------------------

def _canonical_product(gens, coeffs):
    out = IDENTITY
    for g, k in zip(gens, coeffs):
        if k:
            out = mul(out, power(g, k))
    return out


@dataclass(frozen=True)
class HeisenbergSubgroup:
    """Canonical form of a subgroup of H(Z).

    image_lattice is the HNF image in Z^2, center_gen is m with H ∩ Z(H) = mZ,
    and coset_data holds the central entries of fixed preimages of the image
    basis, reduced mod m when m > 0.
    """

    image_lattice: IntegerLattice
    center_gen: int
    coset_data: tuple

    def lifts(self):
        return [(r[0], r[1], c) for r, c in zip(self.image_lattice.basis, self.coset_data)]

    def generators(self):
        gens = self.lifts()
        if self.center_gen:
            gens.append((0, 0, self.center_gen))
        return gens

    def contains(self, g):
        a, b, c = g
        t = self.image_lattice.coordinates((a, b))
        if t is None:
            return False
        cand = _canonical_product(self.lifts(), t)
        diff = c - cand[2]
        return diff == 0 if self.center_gen == 0 else diff % self.center_gen == 0

    __contains__ = contains

    def contains_log(self, X):
        coords = X.coords if hasattr(X, "coords") else X
        g = from_log(coords)
        return g is not None and self.contains(g)

    def join(self, other):
        return subgroup_generated(self.generators() + other.generators())

    def is_subgroup_of(self, other):
        return all(other.contains(g) for g in self.generators())

    def index_in_full(self):
        """[H(Z) : self], or math.inf."""
        if self.image_lattice.rank < 2 or self.center_gen == 0:
            return math.inf
        return int(self.image_lattice.covolume()) * self.center_gen

    def key(self):
        return (self.image_lattice.basis, self.center_gen, self.coset_data)

    def to_json(self):
        return {"image_basis": [list(r) for r in self.image_lattice.basis], "center_gen": self.center_gen,
                "coset_data": list(self.coset_data)}

    def __repr__(self):
        return f"HeisenbergSubgroup(image={[list(r) for r in self.image_lattice.basis]}, m={self.center_gen}, offsets={list(self.coset_data)})"


def subgroup_generated(gens) -> HeisenbergSubgroup:
    """Canonical form of the subgroup generated by the given integer triples."""
    gens = [tuple(int(x) for x in g) for g in gens]
    gens = [g for g in gens if g != IDENTITY]
    if not gens:
        return HeisenbergSubgroup(zero_lattice(2), 0, ())
    vecs = [g[:2] for g in gens]
    full = [list(v) + [int(i == j) for j in range(len(gens))] for i, v in enumerate(vecs)]
    rows, piv, kernel = _hnf_core(full, 2)
    m = 0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            m = math.gcd(m, vecs[i][0] * vecs[j][1] - vecs[i][1] * vecs[j][0])
    # kernel rows are exponent vectors of canonical words with trivial image
    for k in kernel:
        m = math.gcd(m, _canonical_product(gens, k[2:])[2])
    image = IntegerLattice(2, [r[:2] for r in rows], 1, piv)
    offsets = []
    for r in rows:
        c = _canonical_product(gens, r[2:])[2]
        offsets.append(c % m if m else c)
    return HeisenbergSubgroup(image, m, tuple(offsets))


def full_group():
    return subgroup_generated([X, Y])


def bfs_subgroup_oracle(gens, box=(16, 16, 80), max_steps=None):
    """Elements of <gens> inside |a|,|b| <= box[0..1], |c| <= box[2], by saturation.

    Saturating under multiplication by generators and inverses while staying
    in the box gives the set of elements reachable by paths inside the box,
    a subset of the true intersection; with a generous box relative to the
    query region it agrees with the subgroup on that region.
    """
    letters = []
    for g in gens:
        for h in (tuple(g), inv(tuple(g))):
            if h not in letters and h != IDENTITY:
                letters.append(h)
    A, B, C = box
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for w in frontier:
            for g in letters:
                z = mul(w, g)
                if abs(z[0]) <= A and abs(z[1]) <= B and abs(z[2]) <= C and z not in seen:
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    return seen


# -- interval-set dynamic programme ----------------------------------------------

def _merge(intervals):
    intervals.sort()
    out = []
    for lo, hi in intervals:
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return out


def _apply_family(cells, family):
    """Right-multiply every element of the cell map by every generator in family.

    cells maps (a, b) to a merged list of [lo, hi] integer intervals of c.
    A family entry (a', b', clo, chi) sends (a, b, c) to
    (a + a', b + b', c + a·b' + [clo, chi]).
    """
    acc = {}
    for (a, b), ivs in cells.items():
        for da, db, clo, chi in family:
            shift_lo = a * db + clo
            shift_hi = a * db + chi
            key = (a + da, b + db)
            lst = acc.get(key)
            if lst is None:
                lst = acc[key] = []
            lst.extend([lo + shift_lo, hi + shift_hi] for lo, hi in ivs)
    return {k: _merge(v) for k, v in acc.items()}


def cells_size(cells):
    return sum(hi - lo + 1 for ivs in cells.values() for lo, hi in ivs)


def power_sizes(stages, n_max, start=None, budget=None, keep=False):
    """Sizes of S^1..S^n_max where S is the product of the stage families.

    ``stages`` is a list of families; S = F_1·F_2⋯ as sets.  Returns the
    sizes and optionally the cell maps.
    """
    budget = point_budget(budget)
    cells = start if start is not None else {(0, 0): [[0, 0]]}
    sizes, snaps = [], []
    for _ in range(n_max):
        for fam in stages:
            cells = _apply_family(cells, fam)
        work = sum(len(v) for v in cells.values())
        if work > budget:
            raise ResourceError(f"interval DP exceeded budget of {budget} intervals", budget=budget)
        sizes.append(cells_size(cells))
        if keep:
            snaps.append(cells)
    return (sizes, snaps) if keep else sizes


def tao_stages(N):
    """Families whose product is the box S = [-N,N]^2 x [-N^3,N^3].

    (a', b', c') = (0, b', 0)·(a', 0, c'), so S factors into a y-move stage
    and an x-and-centre stage.
    """
    N3 = N**3
    first = [(0, db, 0, 0) for db in range(-N, N + 1)]
    second = [(da, 0, -N3, N3) for da in range(-N, N + 1)]
    return [first, second]


def standard_family(gens=(X, Y)):
    """Family for S̄ = {id} ∪ S ∪ S^-1 with single-element generators."""
    fam = [(0, 0, 0, 0)]
    for g in gens:
        for h in (tuple(g), inv(tuple(g))):
            f = (h[0], h[1], h[2], h[2])
            if f not in fam:
                fam.append(f)
    return [fam]


def ball_cells(radius, gens=(X, Y), budget=None):
    """Cell maps of the balls of radius 0..radius for the generating set gens."""
    if radius == 0:
        return [{(0, 0): [[0, 0]]}]
    sizes, snaps = power_sizes(standard_family(gens), radius, budget=budget, keep=True)
    return [{(0, 0): [[0, 0]]}] + snaps


def ball_sizes(radius, gens=(X, Y), budget=None):
    return [1] + power_sizes(standard_family(gens), radius, budget=budget)


def cell_elements(cells):
    for (a, b), ivs in cells.items():
        for lo, hi in ivs:
            for c in range(lo, hi + 1):
                yield (a, b, c)


# -- the Tao example relations ---------------------------------------------------------

def tao_generating_set_contains(g, N):
    return abs(g[0]) <= N and abs(g[1]) <= N and abs(g[2]) <= N**3


def tao_relations(N, samples):
    """Relators (as lists of (element, exponent)) of the displayed families.

    Each relator multiplies out to the identity; its length counts letters of S.
    """
    rels = [
        ("commutator", [(X, 1), (Y, 1), (X, -1), (Y, -1), (Z, -1)]),
        ("x-commutes-z", [(X, 1), (Z, 1), (X, -1), (Z, -1)]),
        ("y-commutes-z", [(Y, 1), (Z, 1), (Y, -1), (Z, -1)]),
    ]
    for a, b, c in samples:
        for s in (1, -1):
            g = (a, b, c)
            if abs(a + s) <= N:
                rels.append(("x-family", [(g, 1), ((s, 0, 0), 1), ((a + s, b, c), -1)]))
            if abs(b + s) <= N:
                rels.append(("y-family", [((0, s, 0), 1), (g, 1), ((a, b + s, c), -1)]))
            if abs(c + s) <= N**3:
                rels.append(("z-family", [(g, 1), ((0, 0, s), 1), ((a, b, c + s), -1)]))
    return rels
