"""Concrete finitely generated groups with word metrics.

Covers finite and free abelian products, the discrete Heisenberg group and
its reductions mod m: balls and growth, breadth-first subgroup exploration
by dyadic scales, relation scales of abelian products, and the small
combinatorial lemmas about balls, generating sets and subgroup chains.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import heisenberg as heis
from ._rational import point_budget
from .convex import l1_ball
from .errors import ResourceError, UsageError
from .geometry import explore, lattice_points_in
from .lattice import IntegerLattice, index as lattice_index, intersect, span_z, zero_lattice

KINDS = ("abelian", "heisenberg-Z", "heisenberg-mod-m")
TAO_MAX_N = 4
TAO_MAX_STEPS = 24


@dataclass(frozen=True)
class ConcreteGroup:
    """A group with a finite generating set.

    kind "abelian" is the product of Z/n_i (n_i = 0 meaning Z); "heisenberg-Z"
    is H(Z) with integer triples; "heisenberg-mod-m" reduces entries mod m.
    A Heisenberg group with tao_N set uses the box generating set of that size.
    """

    kind: str
    generators: tuple
    moduli: tuple = ()
    m: int = 0
    tao_N: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown group kind {self.kind!r}")
        gens = tuple(self.normalize(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)

    # -- arithmetic ------------------------------------------------------------
    def normalize(self, g):
        g = tuple(int(x) for x in g)
        if self.kind == "abelian":
            if len(g) != len(self.moduli):
                raise UsageError(f"element {g} has wrong length for moduli {self.moduli}")
            return tuple(x % n if n else x for x, n in zip(g, self.moduli))
        if len(g) != 3:
            raise UsageError(f"Heisenberg elements are triples (a, b, c), got {g}")
        if self.kind == "heisenberg-mod-m":
            return tuple(x % self.m for x in g)
        return g

    @property
    def identity(self):
        return (0,) * len(self.moduli) if self.kind == "abelian" else heis.IDENTITY

    def mul(self, g, h):
        if self.kind == "abelian":
            return self.normalize(tuple(x + y for x, y in zip(g, h)))
        return self.normalize(heis.mul(g, h))

    def inv(self, g):
        if self.kind == "abelian":
            return self.normalize(tuple(-x for x in g))
        return self.normalize(heis.inv(g))

    def closed_generators(self):
        """S̄ = S ∪ {id} ∪ S^-1 in a fixed order."""
        out = [self.identity]
        for g in self.generators:
            for h in (g, self.inv(g)):
                if h not in out:
                    out.append(h)
        return out

    @property
    def is_finite(self):
        if self.kind == "abelian":
            return all(n > 0 for n in self.moduli)
        return self.kind == "heisenberg-mod-m"

    def order(self):
        if not self.is_finite:
            return math.inf
        if self.kind == "abelian":
            return math.prod(self.moduli)
        return self.m**3

    def is_standard_abelian(self):
        """Generators are ±e_i up to sign, so word length is the lifted l1 norm."""
        if self.kind != "abelian":
            return False
        k = len(self.moduli)
        std = {self.normalize(tuple(int(i == j) for j in range(k))) for i in range(k)}
        std |= {self.inv(g) for g in std}
        sym = set(self.generators) | {self.inv(g) for g in self.generators}
        return sym == std

    def to_json(self):
        d = {"kind": self.kind, "generators": [list(g) for g in self.generators]}
        if self.kind == "abelian":
            d["moduli"] = list(self.moduli)
        if self.kind == "heisenberg-mod-m":
            d["m"] = self.m
        if self.tao_N:
            d["N"] = self.tao_N
        return d


def abelian_group(moduli, generators=None):
    moduli = tuple(int(n) for n in moduli)
    if any(n < 0 for n in moduli):
        raise UsageError("moduli must be non-negative (0 means Z)")
    if generators is None:
        generators = [tuple(int(i == j) for j in range(len(moduli))) for i in range(len(moduli))]
    return ConcreteGroup("abelian", tuple(generators), moduli)


def heisenberg_group(generators=None, N=0):
    if N:
        if N < 1:
            raise UsageError("N must be positive")
        return ConcreteGroup("heisenberg-Z", (heis.X, heis.Y, heis.Z), tao_N=int(N))
    return ConcreteGroup("heisenberg-Z", tuple(generators or (heis.X, heis.Y)))


def heisenberg_mod_group(m, generators=None):
    if m < 2:
        raise UsageError("modulus must be at least 2")
    return ConcreteGroup("heisenberg-mod-m", tuple(generators or (heis.X, heis.Y)), m=int(m))


def group_from_json(data) -> ConcreteGroup:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        kind = data["kind"]
        gens = data.get("generators")
        if kind in ("abelian", "finite-abelian"):
            return abelian_group(data["moduli"], [tuple(g) for g in gens] if gens else None)
        if kind in ("heisenberg-Z", "heisenberg-tao"):
            if data.get("N"):
                return heisenberg_group(N=int(data["N"]))
            return heisenberg_group([heis.from_matrix(g) if isinstance(g[0], list) else tuple(g) for g in gens]
                                    if gens else None)
        if kind == "heisenberg-mod-m":
            return heisenberg_mod_group(int(data["m"]), [tuple(g) for g in gens] if gens else None)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"malformed group spec: {exc}")
    raise UsageError(f"unknown group kind {data.get('kind')!r}")


# -- balls and growth -------------------------------------------------------------

@dataclass
class Ball:
    radius: int
    elements: list
    size: int
    word_length: dict


def ball(G: ConcreteGroup, r: int, budget=None) -> Ball:
    """Exact ball of radius r by breadth-first search under S̄."""
    if r < 0:
        raise UsageError("radius must be non-negative")
    budget = point_budget(budget)
    if G.tao_N:
        raise UsageError("element-wise balls of the box generating set are not materialized; use ball_sizes")
    gens = G.closed_generators()[1:]
    dist = {G.identity: 0}
    frontier = [G.identity]
    for step in range(1, r + 1):
        nxt = []
        for w in frontier:
            for g in gens:
                z = G.mul(w, g)
                if z not in dist:
                    dist[z] = step
                    nxt.append(z)
        if len(dist) > budget:
            raise ResourceError(f"ball exceeded budget of {budget} elements", budget=budget)
        frontier = nxt
        if not frontier:
            break
    elems = sorted(dist)
    return Ball(r, elems, len(elems), dist)


def ball_sizes(G: ConcreteGroup, r_max: int, budget=None):
    """Gr(0..r_max); Heisenberg groups use the interval DP."""
    if G.kind == "heisenberg-Z":
        if G.tao_N:
            return [1] + heis.power_sizes(heis.tao_stages(G.tao_N), r_max, budget=budget)
        return heis.ball_sizes(r_max, G.generators, budget=budget)
    budget = point_budget(budget)
    gens = G.closed_generators()[1:]
    seen = {G.identity}
    frontier = [G.identity]
    sizes = [1]
    for _ in range(r_max):
        nxt = []
        for w in frontier:
            for g in gens:
                z = G.mul(w, g)
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        if len(seen) > budget:
            raise ResourceError(f"ball exceeded budget of {budget} elements", budget=budget)
        frontier = nxt
        sizes.append(len(seen))
    return sizes


@dataclass
class GrowthProfile:
    sizes: list
    ratios: dict  # r -> Gr(3r)/Gr(r)

    def rows(self):
        return [{"radius": r, "size": s, "ratio_3r": _fmt_ratio(self.ratios.get(r))}
                for r, s in enumerate(self.sizes)]


def _fmt_ratio(q):
    if q is None:
        return ""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def growth_profile(G: ConcreteGroup, r_max: int, budget=None) -> GrowthProfile:
    sizes = ball_sizes(G, r_max, budget)
    ratios = {r: Fraction(sizes[3 * r], sizes[r]) for r in range(1, r_max // 3 + 1)}
    return GrowthProfile(sizes, ratios)


def doubling_exponents(G: ConcreteGroup, j_max: int, budget=None):
    """log2 Gr(2^(j+1)) - log2 Gr(2^j) for j = 0..j_max-1."""
    sizes = ball_sizes(G, 2**j_max, budget)
    return [math.log2(sizes[2 ** (j + 1)]) - math.log2(sizes[2**j]) for j in range(j_max)]


@dataclass
class TaoProfile:
    N: int
    sizes: list  # |S^n| for n = 1..n_max
    slope_low: float
    slope_high: float

    def rows(self):
        S = self.sizes[0]
        return [{"n": n, "size": s, "log_ratio": math.log(s / S)} for n, s in enumerate(self.sizes, 1)]


def _slope(xs, ys):
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs), ys, 1)[0])


def tao_example_profile(N: int, n_max: int, budget=None, max_N=TAO_MAX_N, max_steps=TAO_MAX_STEPS) -> TaoProfile:
    """|S^n| for the box S = [-N,N]^2 x [-N^3,N^3] with slopes split at n = N."""
    if N < 1 or n_max < 1:
        raise UsageError("need N >= 1 and n_max >= 1")
    if N > max_N or n_max > max_steps:
        raise ResourceError(f"tao profile (N={N}, n_max={n_max}) exceeds ceiling (N<={max_N}, n<={max_steps})",
                            budget=(max_N, max_steps))
    sizes = heis.power_sizes(heis.tao_stages(N), n_max, budget=budget)
    n = np.arange(1, n_max + 1)
    y = np.log(np.array(sizes, dtype=float) / sizes[0])
    lo, hi = n <= N, n > N
    return TaoProfile(N, sizes, _slope(n[lo], y[lo]), _slope(n[hi], y[hi]))


def tao_relation_check(N: int, samples=50, rng=None):
    """Verify every displayed relation family as a matrix identity with length <= 5."""
    rng = rng if rng is not None else np.random.Generator(np.random.PCG64(0))
    N3 = N**3
    pts = [(int(rng.integers(-N, N + 1)), int(rng.integers(-N, N + 1)), int(rng.integers(-N3, N3 + 1)))
           for _ in range(samples)]
    results = []
    for name, word in heis.tao_relations(N, pts):
        ok_letters = all(heis.tao_generating_set_contains(g, N) for g, _ in word)
        length = sum(abs(e) for _, e in word)
        holds = heis.word_product(word) == heis.IDENTITY
        results.append((name, length, holds and ok_letters))
    return results


# -- scale reports ----------------------------------------------------------------

def canonical_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class ScaleReport:
    scales: list
    objects: list
    change_scales: list
    change_count: int
    not_computed: list = field(default_factory=list)

    def rows(self):
        return [{"scale": s, "canonical_hash": canonical_hash(o), "changed": s in self.change_scales}
                for s, o in zip(self.scales, self.objects)]

    def to_json(self):
        return {"scales": list(self.scales), "change_scales": list(self.change_scales),
                "change_count": self.change_count, "not_computed": list(self.not_computed),
                "objects": list(self.objects)}


def _changes(scales, objs):
    return [s for s, a, b in zip(scales, objs, objs[1:]) if a != b]


def abelian_word_length(G: ConcreteGroup, g):
    """min l1 over lifts, for the standard generators."""
    return sum(min(abs(x), n - abs(x)) if n else abs(x) for x, n in zip(G.normalize(g), G.moduli))


def _lift_lattice(G, vectors):
    k = len(G.moduli)
    rows = [list(v) for v in vectors]
    rows += [[n * int(i == j) for j in range(k)] for i, n in enumerate(G.moduli) if n]
    return span_z(rows, k) if rows else zero_lattice(k)


def subgroup_scales(G: ConcreteGroup, H_gens, n_max: int, budget=None) -> ScaleReport:
    """H_n = <h in H : |h|_S <= 2^n> for n = 0..n_max, with change scales {n : H_{n+1} != H_n}."""
    H_gens = [G.normalize(g) for g in H_gens]
    scales = list(range(n_max + 1))
    if G.kind == "abelian" and G.is_standard_abelian():
        full = _lift_lattice(G, H_gens)
        kernel = _lift_lattice(G, [])
        chain = []
        for n in scales:
            if chain and chain[-1] == full:
                chain.append(full)
                continue
            pts = lattice_points_in(full, l1_ball(len(G.moduli), 2**n), budget)
            chain.append(_lift_lattice(G, pts) if pts else kernel)
        objs = [L.to_json() for L in chain]
    elif G.kind == "heisenberg-Z" and not G.tao_N:
        objs = _heisenberg_scales(G, H_gens, scales, budget)
    else:
        objs = _finite_scales(G, H_gens, scales, budget)
    ch = _changes(scales, objs)
    return ScaleReport(scales, objs, ch, len(ch))


def _heisenberg_scales(G, H_gens, scales, budget):
    target = heis.subgroup_generated(H_gens)
    family = heis.standard_family(G.generators)
    cells = {(0, 0): [[0, 0]]}
    radius = 0
    cur = heis.subgroup_generated([])
    objs = []
    for n in scales:
        if cur == target:
            objs.append(cur.to_json())
            continue
        R = 2**n
        while radius < R:
            cells = heis._apply_family(cells, family[0])
            radius += 1
            if sum(len(v) for v in cells.values()) > point_budget(budget):
                raise ResourceError("ball DP exceeded the point budget", budget=point_budget(budget))
        cur = _join_cells(cur, target, cells)
        objs.append(cur.to_json())
    return objs


def _join_cells(cur, target, cells):
    m = target.center_gen
    lifts = target.lifts()
    new = []
    for (a, b), ivs in sorted(cells.items()):
        t = target.image_lattice.coordinates((a, b))
        if t is None:
            continue
        c0 = heis._canonical_product(lifts, t)[2]
        for lo, hi in ivs:
            if m == 0:
                if lo <= c0 <= hi:
                    new.append((a, b, c0))
                continue
            first = lo + (c0 - lo) % m
            if first <= hi:
                new.append((a, b, first))
                if first + m <= hi:
                    new.append((0, 0, m))
    for g in new:
        if not cur.contains(g):
            cur = heis.subgroup_generated(cur.generators() + [g])
            if cur == target:
                break
    return cur


def _enumerate_group(G, budget=None):
    """All elements of a finite group."""
    if not G.is_finite:
        raise UsageError("group is infinite")
    budget = point_budget(budget)
    if G.order() > budget:
        raise ResourceError(f"group order {G.order()} exceeds budget {budget}", budget=budget)
    return ball(G, G.order(), budget)


def subgroup_closure(G, gens):
    """Elements of <gens> in a finite group, by closure."""
    gens = [G.normalize(g) for g in gens]
    letters = [h for g in gens for h in (g, G.inv(g))]
    seen = {G.identity}
    queue = deque([G.identity])
    while queue:
        w = queue.popleft()
        for g in letters:
            z = G.mul(w, g)
            if z not in seen:
                seen.add(z)
                queue.append(z)
    return frozenset(seen)


def _finite_scales(G, H_gens, scales, budget):
    B = _enumerate_group(G, budget)
    H = subgroup_closure(G, H_gens)
    objs = []
    for n in scales:
        R = 2**n
        gens = [h for h in H if B.word_length.get(h, math.inf) <= R]
        Hn = subgroup_closure(G, gens)
        objs.append(sorted(list(x) for x in Hn))
    return objs


# -- relation scales of abelian products ---------------------------------------------

def relation_lattice(moduli) -> IntegerLattice:
    k = len(moduli)
    rows = [[n * int(i == j) for j in range(k)] for i, n in enumerate(moduli) if n]
    return span_z(rows, k) if rows else zero_lattice(k)


def abelian_relation_scales(moduli, k_max: int, budget=None) -> ScaleReport:
    """Scales n in [2, k_max] where a new relation appears, via l1 exploration of the kernel.

    Scale n is new when span_Z(ker ∩ B(2^(n+1))) != span_Z(ker ∩ B(2^n)).
    Scales 0 and 1 are not computed.
    """
    moduli = tuple(int(n) for n in moduli)
    if k_max < 2:
        raise UsageError("relation scales are computed for n >= 2 only")
    K = relation_lattice(moduli)
    d = len(moduli)
    radii = [2**n for n in range(2, k_max + 2)]
    rep = explore(K, [l1_ball(d, r) for r in radii], scales=list(range(2, k_max + 2)), budget=budget)
    chain = rep.chain
    scales = list(range(2, k_max + 1))
    changes = [n for i, n in enumerate(scales) if chain[i + 1] != chain[i]]
    objs = [L.to_json() for L in chain[:-1]]
    return ScaleReport(scales, objs, changes, len(changes), not_computed=[0, 1])


def prescribed_scale_moduli(scales):
    """Moduli n_i = 2^(s+1) whose product realizes the given relation scales."""
    return tuple(2 ** (s + 1) for s in scales)


# -- lemmas ------------------------------------------------------------------------

@dataclass
class InjectivityVerdict:
    n: int
    k: int
    radius: int
    isomorphic: bool
    sizes: tuple


def _labeled_bfs(start, step, gens, radius):
    """Canonical serialization of a ball: BFS labels and labelled edges inside the ball."""
    label = {start: 0}
    order = [start]
    dist = {start: 0}
    q = deque([start])
    while q:
        u = q.popleft()
        if dist[u] == radius:
            continue
        for g in gens:
            v = step(u, g)
            if v not in label:
                label[v] = len(order)
                order.append(v)
                dist[v] = dist[u] + 1
                q.append(v)
    edges = []
    for u in order:
        for i, g in enumerate(gens):
            v = step(u, g)
            if v in label:
                edges.append((label[u], i, label[v]))
    return len(order), tuple(edges)


def injectivity_radius_check(n: int, k: int, strict=True) -> InjectivityVerdict:
    """Compare labelled balls of radius 2^(k-1) - 1 in Z and Z/n."""
    if strict and not 2**k < n:
        raise UsageError(f"need 2^k < n (k={k}, n={n})")
    r = 2 ** (k - 1) - 1
    gens = (1, -1)
    a = _labeled_bfs(0, lambda u, g: u + g, gens, r)
    b = _labeled_bfs(0, lambda u, g: (u + g) % n, gens, r)
    return InjectivityVerdict(n, k, r, a == b, (a[0], b[0]))


@dataclass
class GeneratingVerdict:
    index: int
    radius: int
    generates: bool
    intersection_size: int


def finite_index_generating_check(G: ConcreteGroup, H_gens, budget=None) -> GeneratingVerdict:
    """Check that (S̄)^(2n-1) ∩ H generates H where n = [G : H]."""
    B_all = _enumerate_group(G, budget)
    H = subgroup_closure(G, H_gens)
    idx = B_all.size // len(H)
    r = 2 * idx - 1
    B = ball(G, r, budget)
    inter = [h for h in B.elements if h in H]
    gen = subgroup_closure(G, inter)
    return GeneratingVerdict(idx, r, gen == H, len(inter))


@dataclass
class ChainVerdict:
    distinct: int
    distinct_sub: int
    max_index: int
    bound: int
    holds: bool


def chain_count_check(chain, subchain) -> ChainVerdict:
    """#{H_i} <= (1 + floor(log2 max [H_i : H'_i])) · #{H'_i} for lattice chains."""
    if len(chain) != len(subchain):
        raise UsageError("chains have different lengths")
    for a, b in zip(chain, chain[1:]):
        if not a.is_sublattice_of(b):
            raise UsageError("chain is not increasing")
    idx = []
    for H, Hp in zip(chain, subchain):
        i = lattice_index(Hp, H)
        if i == math.inf:
            raise UsageError("infinite index in chain")
        idx.append(i)
    distinct = len(set(chain))
    distinct_sub = len(set(subchain))
    M = max(idx)
    bound = (1 + (M.bit_length() - 1)) * distinct_sub
    return ChainVerdict(distinct, distinct_sub, M, bound, distinct <= bound)


def corollary_chain_check(chain, G_prime: IntegerLattice) -> ChainVerdict:
    """The specialization H'_i = H_i ∩ G' for a finite-index G'."""
    return chain_count_check(chain, [intersect(H, G_prime) for H in chain])
