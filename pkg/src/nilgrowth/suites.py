"""Seeded randomized verification suites.

Every suite draws from numpy's PCG64 generator seeded by the caller, so a
given seed reproduces the same instances on every run.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import heisenberg as heis
from .convex import box, graded_box, l1_ball, l2_ball, polytope
from .errors import UsageError
from .geometry import explore, exploration_bound, minkowski_second_check
from .groups import abelian_group, heisenberg_group, heisenberg_mod_group, subgroup_scales
from .harmonious import GradedLattice, is_harmonious, multiplicative_index
from .lattice import IntegerLattice, index as lattice_index, span_z
from ._rational import det
from .lie import heisenberg_algebra

PRNG_NAME = "numpy.random.PCG64"
PRNG_VERSION = np.__version__


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) % 2**64))


def _frac(rng, lo, hi, dens=(1, 2, 3, 4)):
    """Random rational in [lo, hi] with a small denominator."""
    q = int(rng.choice(dens))
    a, b = math.ceil(lo * q), math.floor(hi * q)
    return Fraction(int(rng.integers(a, b + 1)), q)


def random_lattice(rng, d, full=True, max_det=8):
    while True:
        B = [[int(rng.integers(-2, 3)) for _ in range(d)] for _ in range(d)]
        for i in range(d):
            B[i][i] += int(rng.choice([1, 2]))
        D = abs(det(B))
        if D == 0 or D > max_det:
            continue
        q = int(rng.choice([1, 1, 2]))
        rows = B if full else B[: int(rng.integers(1, d + 1))]
        return span_z([[Fraction(x, q) for x in r] for r in rows], d)


def random_body(rng, d, kind=None):
    kinds = ("box", "l1", "l2", "polytope", "graded-box")
    kind = kind or kinds[int(rng.integers(len(kinds)))]
    if kind == "box":
        return box([_frac(rng, Fraction(1, 2), 3) for _ in range(d)])
    if kind == "l1":
        return l1_ball(d, _frac(rng, 1, 3), [_frac(rng, Fraction(1, 2), 2) for _ in range(d)])
    if kind == "l2":
        return l2_ball(d, _frac(rng, 1, 3))
    if kind == "graded-box":
        return graded_box([int(rng.integers(1, 3)) for _ in range(d)], _frac(rng, 1, 2))
    while True:
        vs = [[int(rng.integers(-2, 3)) for _ in range(d)] for _ in range(d + int(rng.integers(0, 3)))]
        try:
            return polytope(vs)
        except UsageError:
            continue


# -- Minkowski ---------------------------------------------------------------------

def minkowski_suite(seed, dims=(2, 3, 4), trials=500, budget=None):
    rng = make_rng(seed)
    rows = []
    for t in range(trials):
        d = int(dims[t % len(dims)])
        L = random_lattice(rng, d)
        K = random_body(rng, d)
        r = minkowski_second_check(L, K, budget)
        lo, hi = r.rho_bounds()
        rows.append({"trial": t, "dim": d, "body": K.kind, "rho_lower": lo, "rho_upper": hi,
                     "rho": r.to_json()["rho"] or "", "bound": math.factorial(d), "verdict": r.verdict})
    return rows


# -- exploration -----------------------------------------------------------------------

def random_nested_bodies(rng, d, length):
    kind = ("box", "thin-box", "l1", "l2")[int(rng.integers(4))]
    out = []
    if kind in ("box", "thin-box"):
        if kind == "thin-box":
            hw = [Fraction(1, 8)] * d
            hw[int(rng.integers(d))] = _frac(rng, Fraction(1, 2), 2)
        else:
            hw = [_frac(rng, Fraction(1, 4), 1) for _ in range(d)]
        for _ in range(length):
            out.append(box(hw))
            j = int(rng.integers(d))
            hw = list(hw)
            hw[j] = min(hw[j] * int(rng.choice([1, 2, 3])) + Fraction(int(rng.integers(0, 2)), 2), Fraction(4))
    elif kind == "l1":
        r = _frac(rng, Fraction(1, 2), 1)
        w = [_frac(rng, 1, 8) for _ in range(d)]
        for _ in range(length):
            out.append(l1_ball(d, r, w))
            j = int(rng.integers(d))
            w = list(w)
            w[j] = max(w[j] / int(rng.choice([1, 2, 4])), Fraction(1, 2))
            r = min(r * Fraction(int(rng.choice([2, 3, 4])), 2), Fraction(4))
    else:
        r = _frac(rng, Fraction(1, 2), 1)
        for _ in range(length):
            out.append(l2_ball(d, r))
            r = min(r * Fraction(int(rng.choice([2, 3, 4])), 2), Fraction(4))
    return out


def exploration_suite(seed, dims=(1, 2, 3, 4), trials=500, budget=None):
    rng = make_rng(seed)
    rows = []
    for t in range(trials):
        d = int(dims[t % len(dims)])
        L = random_lattice(rng, d, full=bool(rng.integers(0, 4)))
        bodies = random_nested_bodies(rng, d, int(rng.integers(3, 9)))
        rep = explore(L, bodies, budget=budget)
        strict = all(i >= 2 for s, i in zip(rep.scales, rep.indices) if s in rep.change_scales)
        rows.append({"trial": t, "dim": d, "changes": rep.change_count, "bound": rep.bound,
                     "verdict": rep.verdict and strict})
    return rows


def adversarial_d4():
    """Z^4 + Z·½(1,1,1,1) under weighted l1 bodies opening one axis at a time: 5 changes."""
    h = Fraction(1, 2)
    L = span_z([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (h, h, h, h)])
    M = 100
    ws = [(1, M, M, M), (1, 1, M, M), (1, 1, 1, M), (1, 1, 1, 1)]
    return L, [l1_ball(4, 1, w) for w in ws] + [l1_ball(4, 2)]


def adversarial_search(seed, d=2, trials=300, budget=None):
    """Search thin-body sequences for the largest change count in dimension d."""
    rng = make_rng(seed)
    best, best_case = -1, None
    for _ in range(trials):
        L = random_lattice(rng, d, max_det=12)
        # thin boxes opening one coordinate at a time, then a shear-aligned l1 family
        bodies = random_nested_bodies(rng, d, int(rng.integers(3, 9)))
        rep = explore(L, bodies, budget=budget)
        if rep.change_count > best:
            best, best_case = rep.change_count, (L, bodies)
    # hand-built candidates: a thin box along a lattice line, then widening
    for q in range(2, 7):
        L = span_z([(1, 0), (Fraction(1, q), Fraction(1, q))])
        seq = [box([Fraction(3, 2), Fraction(1, 4 * q)]), box([Fraction(3, 2), Fraction(3, 2 * q)]),
               box([Fraction(3, 2), Fraction(3, 2)]), box([Fraction(3), Fraction(3)])]
        rep = explore(L, seq, budget=budget)
        if rep.change_count > best:
            best, best_case = rep.change_count, (L, seq)
    return best, best_case


# -- harmonious Heisenberg pairs -----------------------------------------------------

def random_harmonious_heisenberg(rng):
    """A random harmonious lattice in the Heisenberg algebra (a, b, c coordinates)."""
    H = heisenberg_algebra()
    while True:
        p, q = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        r = int(rng.integers(0, q))
        D = p * q
        gamma = Fraction(D, 2 * int(rng.choice([1, 2])))
        c1 = gamma * Fraction(int(rng.integers(0, 4)), 4)
        c2 = gamma * Fraction(int(rng.integers(0, 4)), 4)
        L = GradedLattice(H, span_z([(p, r, c1), (0, q, c2), (0, 0, gamma)], 3))
        if is_harmonious(L).conclusion is True:
            return L


def random_harmonious_pair(rng):
    while True:
        sup = random_harmonious_heisenberg(rng)
        B = sup.lattice.rational_basis()
        M = [[int(rng.integers(1, 3)) if i == j else (int(rng.integers(0, 2)) if j > i else 0)
              for j in range(3)] for i in range(3)]
        rows = [[sum(M[i][k] * B[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        sub = GradedLattice(sup.algebra, span_z(rows, 3))
        if is_harmonious(sub).conclusion is True:
            return sub, sup


def index_pair_suite(seed, trials=10, budget=None):
    rng = make_rng(seed)
    rows = []
    for t in range(trials):
        sub, sup = random_harmonious_pair(rng)
        add = lattice_index(sub.lattice, sup.lattice)
        mult = multiplicative_index(sub, sup, budget)
        rows.append({"trial": t, "sub": sub.basis_strings(), "super": sup.basis_strings(),
                     "additive_index": add, "multiplicative_index": mult, "verdict": add == mult})
    return rows


# -- subgroup exploration ------------------------------------------------------------------

def subgroup_scale_suite(seed, runs=100, n_max=7, budget=None):
    rng = make_rng(seed)
    rows = []
    for t in range(runs):
        kind = t % 4
        if kind == 0:
            k = int(rng.integers(1, 4))
            G = abelian_group([0] * k)
            gens = [tuple(int(rng.integers(-6, 7)) for _ in range(k)) for _ in range(int(rng.integers(1, 4)))]
        elif kind == 1:
            moduli = [int(rng.integers(2, 65)) for _ in range(int(rng.integers(1, 3)))]
            G = abelian_group(moduli)
            gens = [tuple(int(rng.integers(0, n)) for n in moduli) for _ in range(int(rng.integers(1, 3)))]
        elif kind == 2:
            G = heisenberg_group()
            gens = [(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)), int(rng.integers(-6, 7)))
                    for _ in range(int(rng.integers(1, 4)))]
        else:
            m = int(rng.integers(2, 6))
            G = heisenberg_mod_group(m)
            gens = [tuple(int(rng.integers(0, m)) for _ in range(3)) for _ in range(int(rng.integers(1, 3)))]
        rep = subgroup_scales(G, gens, n_max, budget)
        rows.append({"run": t, "group": G.kind, "generators": [list(g) for g in gens],
                     "change_scales": rep.change_scales, "changes": rep.change_count,
                     "verdict": rep.change_count <= 10})
    return rows
