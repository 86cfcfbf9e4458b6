"""Harmonious subgroups: additive, bracket-closed logarithm lattices.

A subgroup is harmonious when its logarithm is an additive subgroup of the
Lie algebra that is closed under the bracket.  This module builds the
H₋/H₊ sandwich around a discrete subgroup Γ, computes multiplicative
indices by coset enumeration, and counts lattice points in the sublevel
sets of the homogeneous quasi-norm.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from ._rational import Q, fmt_q, lcm, point_budget
from .errors import ConstantTableError, ResourceError, UsageError
from .geometry import count_box_points
from .lattice import IntegerLattice, index as lattice_index, span_z, zero_lattice
from .lie import HallBasis, LieElement, bch, bracket, zassenhaus_terms

GRID_BUDGET = 200_000


# -- types --------------------------------------------------------------------

class GradedLattice:
    """An additive lattice in the coordinates of a Hall basis."""

    def __init__(self, algebra: HallBasis, lattice: IntegerLattice):
        if lattice.ambient_dim != algebra.dim:
            raise UsageError(f"lattice dimension {lattice.ambient_dim} vs algebra dimension {algebra.dim}")
        self.algebra, self.lattice = algebra, lattice
        self._closed = None

    @classmethod
    def span(cls, elems, algebra=None):
        elems = list(elems)
        if algebra is None:
            if not elems:
                raise UsageError("need an algebra for an empty span")
            algebra = elems[0].basis
        return cls(algebra, span_z([e.coords for e in elems], algebra.dim))

    def basis_elements(self):
        return [self.algebra.element(r) for r in self.lattice.rational_basis()]

    generators = basis_elements

    def contains(self, X):
        coords = X.coords if isinstance(X, LieElement) else X
        return self.lattice.contains(coords)

    __contains__ = contains

    def bracket_witness(self):
        basis = self.basis_elements()
        for i, u in enumerate(basis):
            for v in basis[i + 1:]:
                w = bracket(u, v)
                if not self.contains(w):
                    return (u, v, w)
        return None

    @property
    def bracket_closed(self):
        if self._closed is None:
            self._closed = self.bracket_witness() is None
        return self._closed

    def scaled(self, c):
        return GradedLattice(self.algebra, self.lattice.scaled(c))

    def __eq__(self, other):
        return (isinstance(other, GradedLattice) and self.algebra.basis_id == other.algebra.basis_id
                and self.lattice == other.lattice)

    def __hash__(self):
        return hash((self.algebra.basis_id, self.lattice))

    def __repr__(self):
        return f"GradedLattice({self.algebra.basis_id}, {self.lattice!r})"

    def basis_strings(self):
        return [[fmt_q(x) for x in r] for r in self.lattice.rational_basis()]


@dataclass
class LogSet:
    """A subset of the algebra given by a membership predicate and sample points."""

    algebra: HallBasis
    predicate: Callable
    samples: list
    label: str = ""

    def contains(self, X):
        return bool(self.predicate(X))

    __contains__ = contains


@dataclass
class HarmoniousVerdict:
    is_additive_subgroup: object  # True / False / None (inconclusive)
    additive_witness: object = None
    is_bracket_closed: object = None
    bracket_witness: object = None
    is_group_closed: object = None
    group_witness: object = None

    @property
    def conclusion(self):
        parts = (self.is_additive_subgroup, self.is_bracket_closed, self.is_group_closed)
        if any(p is False for p in parts):
            return False
        if any(p is None for p in parts):
            return None
        return True

    @property
    def status(self):
        return {True: "harmonious", False: "not-harmonious", None: "inconclusive"}[self.conclusion]

    def to_json(self):
        def w(x):
            if x is None:
                return None
            return [[fmt_q(c) for c in e.coords] for e in x]
        return {"status": self.status, "is_additive_subgroup": self.is_additive_subgroup,
                "additive_witness": w(self.additive_witness), "is_bracket_closed": self.is_bracket_closed,
                "bracket_witness": w(self.bracket_witness), "is_group_closed": self.is_group_closed,
                "group_witness": w(self.group_witness)}


@dataclass(frozen=True)
class ConstantTable:
    step: int
    C1: int
    C2: int
    provenance: str

    def __post_init__(self):
        if self.C1 < 1 or self.C2 < 1:
            raise UsageError("constants must be positive integers")
        if self.provenance not in ("proven-small-step", "zassenhaus-lcm", "user-override"):
            raise UsageError(f"unknown provenance {self.provenance!r}")


def zassenhaus_lcm(s):
    return lcm(*(t.coefficient.denominator for g in zassenhaus_terms(s) for t in g))


def default_constants(s, C1=None, C2=None) -> ConstantTable:
    """Constant policy: small steps proven, steps 3-4 from Zassenhaus denominators."""
    if C1 is not None or C2 is not None:
        base = default_constants(s) if s <= 4 else None
        c1 = C1 if C1 is not None else base.C1
        c2 = C2 if C2 is not None else base.C2
        return ConstantTable(s, int(c1), int(c2), "user-override")
    if s == 1:
        return ConstantTable(1, 1, 1, "proven-small-step")
    if s == 2:
        return ConstantTable(2, 2, 2, "proven-small-step")
    if s in (3, 4):
        c1 = zassenhaus_lcm(s)
        return ConstantTable(s, c1, c1 ** (3 * (s - 1)), "zassenhaus-lcm")
    raise UsageError(f"no default constants for step {s}; pass C1 and C2 explicitly")


# -- closure and harmonicity ----------------------------------------------------

def bracket_closure(A, algebra=None) -> GradedLattice:
    """Smallest bracket-closed additive lattice containing A."""
    L = GradedLattice.span(A, algebra)
    while True:
        basis = L.basis_elements()
        new = []
        for i, u in enumerate(basis):
            for v in basis[i + 1:]:
                w = bracket(u, v)
                if not L.contains(w):
                    new.append(w)
        if not new:
            L._closed = True
            return L
        L = GradedLattice.span(basis + new, L.algebra)


def _grid_points(n, s):
    """All a in N^n with sum(a) <= s."""
    out = [()]
    for _ in range(n):
        out = [p + (k,) for p in out for k in range(s + 1 - sum(p))]
    return out


def _group_closure_grid(L: GradedLattice, budget):
    """Exact test that exp(L) is closed under the BCH product.

    In lattice coordinates the coefficients of X⋄Y are polynomials of total
    degree <= s; such a polynomial is integer-valued on Z^n iff it is integral
    on {a in N^n : sum(a) <= s}.  Returns (verdict, witness).
    """
    basis = L.basis_elements()
    m, s = len(basis), L.algebra.s
    if m == 0:
        return True, None
    if math.comb(2 * m + s, s) > budget:
        return None, None
    for a in _grid_points(2 * m, s):
        X = _combo(basis, a[:m], L.algebra)
        Y = _combo(basis, a[m:], L.algebra)
        Z = bch(X, Y)
        if not L.contains(Z):
            return False, (X, Y, Z)
    return True, None


def _combo(basis, coeffs, algebra):
    acc = [Fraction(0)] * algebra.dim
    for c, b in zip(coeffs, basis):
        if c:
            for t, x in enumerate(b.coords):
                acc[t] += c * x
    return LieElement(algebra, tuple(acc))


def is_harmonious(L, group_model=None, grid_budget=GRID_BUDGET) -> HarmoniousVerdict:
    """Decide harmonicity of a lattice, or refute it on the samples of a LogSet."""
    if isinstance(L, LogSet):
        return _logset_verdict(L)
    if not isinstance(L, GradedLattice):
        raise UsageError("is_harmonious expects a GradedLattice or LogSet")
    bw = L.bracket_witness()
    closed, gw = _group_closure_grid(L, grid_budget)
    return HarmoniousVerdict(True, None, bw is None, bw, closed, gw)


def _logset_verdict(S: LogSet) -> HarmoniousVerdict:
    samples = list(S.samples)
    add_w = br_w = grp_w = None
    for X in samples:
        for Y in samples:
            if add_w is None and not S.contains(X + Y):
                add_w = (X, Y, X + Y)
            if br_w is None and not S.contains(bracket(X, Y)):
                br_w = (X, Y, bracket(X, Y))
            if grp_w is None and not S.contains(bch(X, Y)):
                grp_w = (X, Y, bch(X, Y))
    # samples can only refute; absence of a witness is inconclusive
    return HarmoniousVerdict(False if add_w else None, add_w,
                             False if br_w else None, br_w,
                             False if grp_w else None, grp_w)


# -- Γ as a set of log-points ------------------------------------------------------

def _inverses(gens):
    out = []
    for g in gens:
        for h in (g, -g):
            if h not in out:
                out.append(h)
    return out


def span_log_gamma(gens, algebra=None) -> GradedLattice:
    """span_Z(log Γ) for Γ generated by exp(gens), exactly.

    Inclusion-exclusion over subwords writes log of any word as an integer
    combination of logs of its subwords of length <= s, so words of length
    <= s in the generators and their inverses suffice.
    """
    gens = list(gens)
    if not gens:
        if algebra is None:
            raise UsageError("need an algebra for an empty generating set")
        return GradedLattice(algebra, zero_lattice(algebra.dim))
    algebra = gens[0].basis
    letters = _inverses(gens)
    logs = set(letters)
    frontier = {g: g for g in letters}
    for _ in range(algebra.s - 1):
        nxt = {}
        for w in frontier.values():
            for g in letters:
                z = bch(w, g)
                nxt[z] = z
        logs.update(nxt)
        frontier = nxt
    return GradedLattice.span(sorted(logs, key=lambda e: e.coords), algebra)


def enumerate_gamma(gens, radius, budget=None):
    """Log-points of the ball of the given word radius in Γ = <exp gens>."""
    budget = point_budget(budget)
    letters = _inverses(gens)
    zero = gens[0].basis.zero()
    seen = {zero}
    frontier = [zero]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for g in letters:
                z = bch(w, g)
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
                    if len(seen) > budget:
                        raise ResourceError(f"ball enumeration exceeded {budget} elements", budget=budget)
        frontier = nxt
    return sorted(seen, key=lambda e: e.coords)


def _require_harmonious(L, label, constants):
    v = is_harmonious(L)
    if v.conclusion is not True:
        raise ConstantTableError(
            f"{label} is {v.status} with C1={constants.C1} (constant may be too small)",
            counterexample=v.to_json())
    return v


def h_minus(gens, constants: ConstantTable, algebra=None) -> GradedLattice:
    """log H₋ = C1·span_Z(log Γ)."""
    S = span_log_gamma(gens, algebra)
    L = S.scaled(constants.C1)
    _require_harmonious(L, "H_minus", constants)
    return L


def h_plus(gens, constants: ConstantTable, algebra=None) -> GradedLattice:
    """log H₊ = C1·B((1/C1)·span_Z(log Γ))."""
    S = span_log_gamma(gens, algebra)
    inner = S.scaled(Fraction(1, constants.C1))
    closed = bracket_closure(inner.basis_elements(), S.algebra)
    L = closed.scaled(constants.C1)
    _require_harmonious(L, "H_plus", constants)
    return L


@dataclass
class SandwichCheck:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)


def sandwich_containments(gens, constants, hm, hp, radius=4, gamma_contains=None, budget=None):
    """Spot-check C1·logΓ ⊆ log H₋ ⊆ logΓ ⊆ log H₊ ⊆ (1/C2)·logΓ.

    The inclusions into log Γ need a membership oracle; they are skipped
    when none is given.
    """
    elems = enumerate_gamma(gens, radius, budget)
    fails = []
    for X in elems:
        if not hm.contains(constants.C1 * X):
            fails.append(("C1*logG in H-", X))
        if not hp.contains(X):
            fails.append(("logG in H+", X))
    if gamma_contains is not None:
        for L, scale, label in ((hm, 1, "H- in logG"), (hp, constants.C2, "C2*H+ in logG")):
            for v in _small_points(L, radius):
                if not gamma_contains(scale * v):
                    fails.append((label, v))
    return SandwichCheck(not fails, len(elems), fails)


def _small_points(L: GradedLattice, r):
    from .geometry import enumerate_points
    B = L.algebra
    pts = enumerate_points(L.lattice, [Fraction(r) ** d for d in B.degrees])
    return [B.element(p) for p in pts]


# -- multiplicative index ---------------------------------------------------------

def _as_subgroup(x):
    if isinstance(x, GradedLattice):
        return x.basis_elements(), x.contains
    if hasattr(x, "generators") and hasattr(x, "contains"):
        gens = x.generators() if callable(x.generators) else x.generators
        return list(gens), x.contains
    raise UsageError("expected a GradedLattice or an object with generators and contains")


def multiplicative_index(sub, sup, budget=None) -> int:
    """[sup : sub] under the BCH group law by breadth-first coset enumeration.

    ``sub`` and ``sup`` are harmonious GradedLattices or objects exposing
    ``generators`` and ``contains`` (log-coordinates).
    """
    budget = point_budget(budget) if budget is not None else 100_000
    sub_gens, sub_has = _as_subgroup(sub)
    sup_gens, sup_has = _as_subgroup(sup)
    for g in sub_gens:
        if not sup_has(g):
            raise UsageError(f"not a subgroup: witness {g!r} not in the super group")
    letters = _inverses(sup_gens)
    if not letters:
        return 1
    reps = [letters[0].basis.zero()]
    queue = deque(reps)
    while queue:
        r = queue.popleft()
        for g in letters:
            x = bch(r, g)
            if not any(sub_has(bch(-q, x)) for q in reps):
                reps.append(x)
                queue.append(x)
                if len(reps) > budget:
                    raise ResourceError(f"coset enumeration exceeded {budget} cosets", budget=budget)
    return len(reps)


@dataclass
class SandwichReport:
    gamma_spec: object
    constants: ConstantTable
    h_minus: GradedLattice
    h_plus: GradedLattice
    additive_index: int
    multiplicative_index: int
    bound: int

    @property
    def verdict(self):
        return self.additive_index == self.multiplicative_index and self.additive_index <= self.bound

    def to_json(self):
        return {"gamma_spec": self.gamma_spec, "C1": self.constants.C1, "C2": self.constants.C2,
                "provenance": self.constants.provenance,
                "h_minus_basis": self.h_minus.basis_strings(), "h_plus_basis": self.h_plus.basis_strings(),
                "additive_index": self.additive_index, "multiplicative_index": self.multiplicative_index,
                "bound": self.bound, "verdict": self.verdict}


def index_sandwich_bound_check(gens, constants: ConstantTable, gamma_spec=None, budget=None) -> SandwichReport:
    """[H₊ : H₋] computed additively and multiplicatively against (C2·C1)^d."""
    gens = list(gens)
    hm = h_minus(gens, constants)
    hp = h_plus(gens, constants)
    add = lattice_index(hm.lattice, hp.lattice)
    mult = multiplicative_index(hm, hp, budget)
    d = hm.algebra.dim
    if gamma_spec is None:
        gamma_spec = {"basis_id": hm.algebra.basis_id, "generators": [[fmt_q(c) for c in g.coords] for g in gens]}
    return SandwichReport(gamma_spec, constants, hm, hp, add, mult, (constants.C2 * constants.C1) ** d)


# -- Følner counting ----------------------------------------------------------------

def folner_count(L: GradedLattice, lam, budget=None) -> int:
    """Number of X in L with pnorm(X) <= lam, i.e. ||X_i||_inf <= lam^i for every degree."""
    lam = Q(lam)
    if lam < 0:
        return 0
    if L.lattice.rank != L.algebra.dim:
        raise UsageError("folner_count needs a full-rank lattice")
    return count_box_points(L.lattice, [lam**d for d in L.algebra.degrees], budget)


def folner_volume_ratio(L: GradedLattice, lam, budget=None):
    """count·covol/lam^q, which tends to vol(F_1) = 2^dim."""
    q = L.algebra.homogeneous_dimension()
    return Fraction(folner_count(L, lam, budget)) * L.lattice.covolume() / Q(lam) ** q


# -- Heisenberg examples ---------------------------------------------------------------

def integer_heisenberg_log_set(samples_radius=1):
    """log of H(Z): a, b in Z, c in ½Z with 2c ≡ ab (mod 2)."""
    from .lie import heisenberg_algebra
    H = heisenberg_algebra()

    def pred(X):
        a, b, c = X.coords
        if a.denominator != 1 or b.denominator != 1 or (2 * c).denominator != 1:
            return False
        return (int(2 * c) - int(a * b)) % 2 == 0

    r = samples_radius
    samples = []
    for a, b in product(range(-r, r + 1), repeat=2):
        for k in range(-r, r + 1):
            c = Fraction(a * b, 2) + k
            samples.append(H.element((a, b, c)))
    samples.sort(key=lambda e: (sum(abs(x) for x in e.coords), [x < 0 for x in e.coords],
                                [-x for x in e.coords]))
    return LogSet(H, pred, samples, "log H(Z)")
