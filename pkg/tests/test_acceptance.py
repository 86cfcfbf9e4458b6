"""Acceptance criteria 1-11, each at its stated tolerance and time limit.

Every test records one PASS/FAIL line, shown in the terminal summary.
"""
import math
import time
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from conftest import ACCEPTANCE_LINES
from nilgrowth import groups, lie, suites
from nilgrowth import harmonious as hm
from nilgrowth.cli import bch_suite, lemma_rows
from nilgrowth.convex import box, l2_ball
from nilgrowth.geometry import exploration_bound, explore, minkowski_second_check
from nilgrowth.lattice import span_z, standard_lattice

F = Fraction
SEED = 7


class Criterion:
    """Collects named checks and a runtime, then records one summary line."""

    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.failed = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, name, ok):
        if not ok:
            self.failed.append(name)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        self.check(f"runtime {elapsed:.1f}s > {self.limit}s", elapsed < self.limit)
        if exc is not None:
            self.failed.append(f"error {exc_type.__name__}: {exc}")
        status = "PASS" if not self.failed else "FAIL"
        line = f"criterion {self.number}: {status} {self.title} ({elapsed:.1f}s)"
        if self.failed:
            line += " failed: " + "; ".join(self.failed)
        ACCEPTANCE_LINES.append(line)
        print(line)
        if exc is None:
            assert not self.failed, line
        return False


def test_criterion_01_bch_zassenhaus():
    with Criterion(1, "BCH/Zassenhaus exactness", 30) as c:
        for row in bch_suite(SEED, 200):
            c.check(f"(k,s)=({row['k']},{row['step']})", row["verdict"])
        g2, g3 = lie.zassenhaus_terms(3)
        c.check("degree 2", [(t.coefficient, t.monomial) for t in g2] == [(F(-1, 2), "[X,Y]")])
        c.check("degree 3", [(t.coefficient, t.monomial) for t in g3]
                == [(F(1, 6), "[X,[X,Y]]"), (F(2, 6), "[Y,[X,Y]]")])


def test_criterion_02_heisenberg_identities():
    with Criterion(2, "Heisenberg identities", 1) as c:
        vals = [F(1), F(-2, 3), F(5, 2), F(0), F(7, 4), F(-1, 5)]
        for i in range(len(vals)):
            a, b, cc, x, y, z = vals[i:] + vals[:i]
            X, Y = lie.heisenberg_element(a, b, cc), lie.heisenberg_element(x, y, z)
            c.check("diamond", lie.bch(X, Y) == lie.heisenberg_element(a + x, b + y, cc + z + (a * y - b * x) / 2))
            g = lie.heisenberg_exp(lie.lie_matrix(X))
            c.check("exp/log", lie.element_from_lie_matrix(lie.heisenberg_log(g)) == X)
        v = hm.is_harmonious(hm.integer_heisenberg_log_set())
        X, Y, S = v.additive_witness
        c.check("non-additivity witness", v.is_additive_subgroup is False
                and (X.coords, Y.coords, S.coords) == ((1, 0, 0), (0, 1, 0), (1, 1, 0)))


def test_criterion_03_minkowski():
    with Criterion(3, "Minkowski second theorem suite", 120) as c:
        rows = suites.minkowski_suite(SEED, (2, 3, 4), 500)
        c.check("500 trials", len(rows) == 500)
        c.check("rho in [1, d!]", all(r["verdict"] for r in rows))
        c.check("l2 cases present", any(r["body"] == "l2" for r in rows))
        Z2 = standard_lattice(2)
        c.check("unit square rho=1", minkowski_second_check(Z2, box([1, 1])).rho == 1)
        disk = minkowski_second_check(Z2, l2_ball(2, 1)).rho
        with mp.workprec(300):
            c.check("disk rho=4/pi", mpf(disk.a) <= 4 / mp.pi <= mpf(disk.b))
        c.check("thin box rho=1", minkowski_second_check(Z2, box([2, F(1, 2)])).rho == 1)


def test_criterion_04_exploration_bound():
    with Criterion(4, "exploration bound", 120) as c:
        rows = suites.exploration_suite(SEED, (1, 2, 3, 4), 500)
        c.check("changes <= bound", len(rows) == 500 and all(r["verdict"] for r in rows))
        c.check("d=2 bound is 4", exploration_bound(2) == 4)
        L, bodies = suites.adversarial_d4()
        rep = explore(L, bodies)
        c.check("d=4 adversarial within bound", rep.verdict)
        best, _ = suites.adversarial_search(SEED, 2, 300)
        c.check(f"d=2 adversarial >= 3 changes (best found {best})", best >= 3)


def test_criterion_05_harmonious_sandwich():
    with Criterion(5, "harmonious sandwich", 10) as c:
        H = lie.heisenberg_algebra()
        gens = [H.element((1, 0, 0)), H.element((0, 1, 0))]
        const = hm.default_constants(2)
        c.check("constants (2,2)", (const.C1, const.C2) == (2, 2))
        inner = span_z([(2, 0, 0), (0, 2, 0), (0, 0, 1)])
        outer = span_z([(1, 0, 0), (0, 1, 0), (0, 0, F(1, 2))])
        c.check("H- = 2Z x 2Z x Z", hm.h_minus(gens, const).lattice == inner)
        c.check("H+ = Z x Z x Z/2", hm.h_plus(gens, const).lattice == outer)
        rep = hm.index_sandwich_bound_check(gens, const)
        c.check("indices 8 = 8 <= 64", (rep.additive_index, rep.multiplicative_index, rep.bound) == (8, 8, 64)
                and rep.verdict)


def test_criterion_06_index_sandwich():
    with Criterion(6, "multiplicative index equals additive index", 60) as c:
        rows = suites.index_pair_suite(SEED, 10)
        c.check("10 pairs", len(rows) == 10)
        c.check("finite index", all(r["additive_index"] < math.inf for r in rows))
        c.check("equal indices", all(r["multiplicative_index"] == r["additive_index"] for r in rows))


def test_criterion_07_folner():
    with Criterion(7, "Folner count", 30) as c:
        Z3 = hm.GradedLattice(lie.heisenberg_algebra(), standard_lattice(3))
        n = hm.folner_count(Z3, 32)
        c.check(f"|F_32|/32^4 = {n / 32**4:.4f} within 15% of 8", abs(F(n, 32**4) - 8) / 8 <= F(15, 100))


def test_criterion_08_relation_scales():
    with Criterion(8, "abelian relation scales", 60) as c:
        bad = [n for n in range(5, 1025)
               if groups.abelian_relation_scales([n], 11).change_scales != [math.ceil(math.log2(n)) - 1]]
        c.check(f"Z/n for 5..1024 (mismatches {bad[:5]})", not bad)
        c.check("Z/8 x Z/64", groups.abelian_relation_scales([8, 64], 10).change_scales == [2, 5])
        m = groups.prescribed_scale_moduli([2, 5, 9])
        c.check(f"prescribed {{2,5,9}} via {m}", groups.abelian_relation_scales(m, 10).change_scales == [2, 5, 9])


def test_criterion_09_subgroup_exploration():
    with Criterion(9, "subgroup exploration", 180) as c:
        Z2 = groups.abelian_group([0, 0])
        c.check("Z^2 <(1,0),(0,5)>", groups.subgroup_scales(Z2, [(1, 0), (0, 5)], 7).change_scales == [2])
        c.check("H = G", groups.subgroup_scales(Z2, [(1, 0), (0, 1)], 7).change_count == 0)
        rep = groups.subgroup_scales(groups.heisenberg_group(), [(2, 0, 0), (0, 2, 0)], 7)
        c.check("Heisenberg <x^2,y^2> count <= 4", rep.change_count <= 4)
        rows = suites.subgroup_scale_suite(SEED, 100)
        c.check("100 runs", len(rows) == 100)
        c.check("<= 10 changes", all(r["changes"] <= 10 for r in rows))


@pytest.mark.slow
def test_criterion_10_tao_example():
    with Criterion(10, "Tao example", 600) as c:
        for N in (2, 3, 4):
            t0 = time.perf_counter()
            prof = groups.tao_example_profile(N, 24)
            c.check(f"N={N} |S| = {prof.sizes[0]}", prof.sizes[0] == (2 * N + 1) ** 2 * (2 * N**3 + 1))
            c.check(f"N={N} slope n<=N {prof.slope_low:.3f} in [2.5,3.5]", 2.5 <= prof.slope_low <= 3.5)
            c.check(f"N={N} slope n>N {prof.slope_high:.3f} in [3.5,4.5]", 3.5 <= prof.slope_high <= 4.5)
            rels = groups.tao_relation_check(N, 50)
            c.check(f"N={N} relations", all(ok and length <= 5 for _, length, ok in rels))
            if N == 4:
                c.check("N=4 under 10 min", time.perf_counter() - t0 < 600)


def test_criterion_11_lemmas():
    with Criterion(11, "lemma examples", 30) as c:
        rows = lemma_rows()
        for lemma in ("injectivity", "generating", "chain"):
            mine = [r for r in rows if r["lemma"] == lemma]
            c.check(f"{lemma}: three examples", len(mine) == 3 and all(r["verdict"] for r in mine))
