"""Symmetric convex bodies with exact membership, gauges and volumes.

Polyhedral kinds (box, weighted l1 ball, graded box, symmetrized polytope)
have exact rational gauges and volumes.  The l2 ball keeps squared gauges
exact and reports its volume as a certified mpmath interval.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import factorial, gcd

from mpmath import iv

from ._rational import Q, det, fmt_q, rank
from .errors import UsageError

IV_PREC = 120
KINDS = ("box", "l1", "l2", "polytope", "graded-box")


def lcm_many(xs):
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def _solve_square(rows, rhs):
    """Solve rows · a = rhs exactly, or None when rows is singular."""
    n = len(rows)
    A = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        p = next((i for i in range(col, n) if A[i][col]), None)
        if p is None:
            return None
        A[col], A[p] = A[p], A[col]
        pr = A[col]
        for i in range(n):
            if i != col and A[i][col]:
                f = A[i][col] / pr[col]
                A[i] = [x - f * y for x, y in zip(A[i], pr)]
    return tuple(A[i][n] / A[i][i] for i in range(n))


class ConvexBody:
    """A symmetric convex body in R^d.

    Build instances through :func:`box`, :func:`l1_ball`, :func:`l2_ball`,
    :func:`polytope` and :func:`graded_box`.
    """

    def __init__(self, kind, dim, params):
        if kind not in KINDS:
            raise UsageError(f"unknown body kind {kind!r}")
        self.kind, self.dim, self.params = kind, dim, params
        self._facets = None
        self._volume = None

    # -- basic geometry --------------------------------------------------
    @property
    def polyhedral(self):
        return self.kind != "l2"

    def _halfwidths(self):
        if self.kind == "box":
            return self.params["halfwidths"]
        lam = self.params["lam"]
        return tuple(lam**g for g in self.params["degrees"])

    def coordinate_bounds(self):
        """Per-coordinate bounds B_j with K inside the box prod [-B_j, B_j]."""
        k = self.kind
        if k in ("box", "graded-box"):
            return self._halfwidths()
        if k == "l1":
            r, w = self.params["radius"], self.params["weights"]
            return tuple(r / wi for wi in w)
        if k == "l2":
            return (self.params["radius"],) * self.dim
        verts = self.params["vertices"]
        return tuple(max(abs(v[j]) for v in verts) for j in range(self.dim))

    @property
    def outer_radius(self):
        return max(self.coordinate_bounds())

    def gauge(self, v):
        """Minkowski functional inf{t >= 0 : v in tK}; exact for polyhedral kinds."""
        v = [Q(x) for x in v]
        self._check_dim(v)
        k = self.kind
        if k in ("box", "graded-box"):
            return max((abs(x) / h for x, h in zip(v, self._halfwidths())), default=Fraction(0))
        if k == "l1":
            r, w = self.params["radius"], self.params["weights"]
            return sum((wi * abs(x) for wi, x in zip(w, v)), Fraction(0)) / r
        if k == "l2":
            raise UsageError("l2 gauge is irrational in general; use gauge_squared")
        return max(sum(a * x for a, x in zip(f, v)) for f in self.facets())

    def gauge_squared(self, v):
        v = [Q(x) for x in v]
        self._check_dim(v)
        if self.kind == "l2":
            return sum(x * x for x in v) / self.params["radius"] ** 2
        g = self.gauge(v)
        return g * g

    def integer_gauge(self, D):
        """Return (score, c) with gauge_squared(w / D) == score(w) * c for integer w.

        score does integer arithmetic only, which keeps enumeration loops cheap.
        """
        k = self.kind
        if k == "l2":
            return (lambda w: sum(x * x for x in w)), Fraction(1, D * D) / self.params["radius"] ** 2
        if k == "l1":
            ws = self.params["weights"]
            q = lcm_many(x.denominator for x in ws)
            W = [int(x * q) for x in ws]
            c = Fraction(1, q * D) / self.params["radius"]

            def score(w):
                s = 0
                for a, x in zip(W, w):
                    s += a * (x if x >= 0 else -x)
                return s * s
            return score, c * c
        if k in ("box", "graded-box"):
            inv_h = [1 / h for h in self._halfwidths()]
        else:
            inv_h = None
        normals = self.facets() if inv_h is None else None
        if inv_h is not None:
            q = lcm_many(x.denominator for x in inv_h)
            M = [int(x * q) for x in inv_h]
            c = Fraction(1, q * D)

            def score(w):
                m = max(a * (x if x >= 0 else -x) for a, x in zip(M, w))
                return m * m
            return score, c * c
        q = lcm_many(x.denominator for f in normals for x in f)
        N = [tuple(int(x * q) for x in f) for f in normals]
        c = Fraction(1, q * D)

        def score(w):
            m = max(sum(a * x for a, x in zip(f, w)) for f in N)
            return m * m
        return score, c * c

    def contains(self, v):
        return self.gauge_squared(v) <= 1

    __contains__ = contains

    def scaled(self, t):
        t = Q(t)
        if t <= 0:
            raise UsageError("scaling factor must be positive")
        k, p = self.kind, self.params
        if k == "box":
            return box([h * t for h in p["halfwidths"]])
        if k == "l1":
            return l1_ball(self.dim, p["radius"] * t, p["weights"])
        if k == "l2":
            return l2_ball(self.dim, p["radius"] * t)
        if k == "graded-box":
            return box([h * t for h in self._halfwidths()])
        return polytope([[x * t for x in v] for v in p["vertices"]])

    def _check_dim(self, v):
        if len(v) != self.dim:
            raise UsageError(f"vector of dimension {len(v)} for a body in dimension {self.dim}")

    # -- polyhedral structure ------------------------------------------
    def vertices(self):
        k = self.kind
        if k in ("box", "graded-box"):
            hw = self._halfwidths()
            return [tuple(s * h for s, h in zip(signs, hw)) for signs in product((1, -1), repeat=self.dim)]
        if k == "l1":
            out = []
            for j, b in enumerate(self.coordinate_bounds()):
                for s in (1, -1):
                    v = [Fraction(0)] * self.dim
                    v[j] = s * b
                    out.append(tuple(v))
            return out
        if k == "polytope":
            return [tuple(v) for v in self.params["points"] if self._is_vertex(v)]
        raise UsageError("l2 ball has no vertices")

    def _is_vertex(self, v):
        tight = [f for f in self.facets() if sum(a * x for a, x in zip(f, v)) == 1]
        return rank(tight) == self.dim if tight else False

    def facets(self):
        """Facet normals a with K = {x : a·x <= 1 for all a}."""
        if self._facets is None:
            self._facets = self._compute_facets()
        return self._facets

    def _compute_facets(self):
        k, d = self.kind, self.dim
        if k in ("box", "graded-box"):
            out = []
            for j, h in enumerate(self._halfwidths()):
                for s in (1, -1):
                    a = [Fraction(0)] * d
                    a[j] = Fraction(s) / h
                    out.append(tuple(a))
            return out
        if k == "l1":
            r, w = self.params["radius"], self.params["weights"]
            return [tuple(s * wi / r for s, wi in zip(signs, w)) for signs in product((1, -1), repeat=d)]
        if k == "l2":
            raise UsageError("l2 ball has no facets")
        pts = self.params["points"]
        found = set()
        for sub in combinations(range(len(pts)), d):
            # solve a·p = 1 for each p in sub
            a = _solve_square([pts[i] for i in sub], [1] * d)
            if a is None:
                continue
            if all(sum(x * y for x, y in zip(a, p)) <= 1 for p in pts):
                found.add(a)
        return sorted(found)

    # -- volume ------------------------------------------------------------
    def volume(self):
        """Exact Fraction for polyhedral kinds, an mpmath interval for l2."""
        if self._volume is None:
            self._volume = self._compute_volume()
        return self._volume

    def _compute_volume(self):
        k, d = self.kind, self.dim
        if k in ("box", "graded-box"):
            v = Fraction(2**d)
            for h in self._halfwidths():
                v *= h
            return v
        if k == "l1":
            v = Fraction(2**d, factorial(d))
            for b in self.coordinate_bounds():
                v *= b
            return v
        if k == "l2":
            old = iv.prec
            iv.prec = max(old, IV_PREC)
            try:
                r = iv.mpf(self.params["radius"].numerator) / self.params["radius"].denominator
                h = d // 2
                if d % 2 == 0:
                    return iv.pi**h * r**d / factorial(h)
                return 2 * factorial(h) * (4 * iv.pi) ** h * r**d / factorial(d)
            finally:
                iv.prec = old
        return _polytope_volume(self)

    def to_json(self):
        p = {}
        for key, val in self.params.items():
            if key == "points":
                continue
            if isinstance(val, tuple) and val and isinstance(val[0], tuple):
                p[key] = [[fmt_q(x) for x in r] for r in val]
            elif isinstance(val, tuple):
                p[key] = [fmt_q(x) if isinstance(x, Fraction) else x for x in val]
            else:
                p[key] = fmt_q(val)
        return {"kind": self.kind, "dim": self.dim, "params": p}

    def __repr__(self):
        return f"ConvexBody({self.kind}, {self.to_json()['params']})"


def _affine_rank(pts):
    if len(pts) <= 1:
        return 0
    p0 = pts[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in pts[1:]])


def _polytope_volume(K):
    pts = list(K.params["points"])
    d = K.dim
    incidence = []
    for f in K.facets():
        incidence.append(frozenset(i for i, p in enumerate(pts) if sum(a * x for a, x in zip(f, p)) == 1))

    def triangulate(face, dim):
        # pulling triangulation: cone from the least vertex over the subfaces avoiding it
        verts = sorted(face)
        if dim == 0:
            return [(verts[0],)]
        v0 = verts[0]
        subs = set()
        for F in incidence:
            G = face & F
            if G != face and G and _affine_rank([pts[i] for i in sorted(G)]) == dim - 1:
                subs.add(G)
        out = []
        for G in subs:
            if v0 in G:
                continue
            for simp in triangulate(G, dim - 1):
                out.append((v0,) + simp)
        return out

    total = Fraction(0)
    for F in incidence:
        for simp in triangulate(F, d - 1):
            total += abs(det([pts[i] for i in simp]))
    return total / factorial(d)


# -- constructors -------------------------------------------------------------

def box(halfwidths):
    hw = tuple(Q(h) for h in halfwidths)
    if not hw or any(h <= 0 for h in hw):
        raise UsageError("box half-widths must be positive")
    return ConvexBody("box", len(hw), {"halfwidths": hw})


def l1_ball(dim, radius, weights=None):
    r = Q(radius)
    w = tuple(Q(x) for x in weights) if weights is not None else (Fraction(1),) * dim
    if r <= 0 or len(w) != dim or any(x <= 0 for x in w):
        raise UsageError("l1 ball needs a positive radius and positive weights")
    return ConvexBody("l1", dim, {"radius": r, "weights": w})


def l2_ball(dim, radius):
    r = Q(radius)
    if r <= 0 or dim < 1:
        raise UsageError("l2 ball needs a positive radius")
    return ConvexBody("l2", dim, {"radius": r})


def graded_box(degrees, lam):
    """Box with half-width lam^deg on each coordinate (a dilated unit cube)."""
    lam = Q(lam)
    if lam <= 0:
        raise UsageError("dilation factor must be positive")
    return ConvexBody("graded-box", len(degrees), {"degrees": tuple(degrees), "lam": lam})


def polytope(vertices):
    """Symmetric hull conv(±v) of the given points; must be full-dimensional."""
    vs = [tuple(Q(x) for x in v) for v in vertices]
    if not vs:
        raise UsageError("polytope needs at least one vertex")
    d = len(vs[0])
    if any(len(v) != d for v in vs):
        raise UsageError("polytope vertices have mixed dimensions")
    if rank(vs) < d:
        raise UsageError("polytope is not full-dimensional")
    pts = []
    for v in vs:
        for w in (v, tuple(-x for x in v)):
            if w not in pts:
                pts.append(w)
    K = ConvexBody("polytope", d, {"vertices": tuple(vs), "points": tuple(pts)})
    K.params["points"] = tuple(K.vertices())
    K.params["vertices"] = tuple(p for p in K.params["points"])
    return K


def body_from_json(data):
    try:
        kind, p = data["kind"], data.get("params", {})
        if kind == "box":
            return box([Fraction(x) for x in p["halfwidths"]])
        if kind == "l1":
            return l1_ball(int(data["dim"]), Fraction(p["radius"]),
                           [Fraction(x) for x in p["weights"]] if "weights" in p else None)
        if kind == "l2":
            return l2_ball(int(data["dim"]), Fraction(p["radius"]))
        if kind == "graded-box":
            return graded_box([int(x) for x in p["degrees"]], Fraction(p["lam"]))
        if kind == "polytope":
            return polytope([[Fraction(x) for x in v] for v in p["vertices"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed body JSON: {exc}")
    raise UsageError(f"unknown body kind {data.get('kind')!r}")


def is_nested(inner: ConvexBody, outer: ConvexBody) -> bool:
    """Exact test of inner ⊆ outer.

    Polyhedral inner bodies are checked on their vertices; an l2 inner ball
    against facet distances or the outer radius.
    """
    if inner.dim != outer.dim:
        raise UsageError("bodies of different dimensions")
    if inner.polyhedral:
        return all(outer.contains(v) for v in inner.vertices())
    r2 = inner.params["radius"] ** 2
    if outer.kind == "l2":
        return inner.params["radius"] <= outer.params["radius"]
    # distance from 0 to the facet a·x = 1 is 1/|a|
    return all(r2 * sum(a * a for a in f) <= 1 for f in outer.facets())
