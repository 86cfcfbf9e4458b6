from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilgrowth import heisenberg as heis
from nilgrowth.errors import ResourceError, UsageError
from nilgrowth.lie import matmul

triples = st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-20, 20))


@settings(max_examples=100, deadline=None)
@given(triples, triples)
def test_group_law_matches_matrices(g, h):
    assert heis.to_matrix(heis.mul(g, h)) == matmul(heis.to_matrix(g), heis.to_matrix(h))
    assert heis.mul(g, heis.inv(g)) == heis.IDENTITY
    assert heis.from_matrix(heis.to_matrix(g)) == g


@settings(max_examples=60, deadline=None)
@given(triples, st.integers(-6, 6))
def test_power_and_commutator(g, n):
    expect = heis.IDENTITY
    step = g if n >= 0 else heis.inv(g)
    for _ in range(abs(n)):
        expect = heis.mul(expect, step)
    assert heis.power(g, n) == expect


@settings(max_examples=60, deadline=None)
@given(triples, triples)
def test_commutator_central(g, h):
    c = heis.product(g, h, heis.inv(g), heis.inv(h))
    assert c == heis.commutator(g, h)
    assert heis.from_log(heis.to_log(g)) == g


def test_from_matrix_validation():
    with pytest.raises(UsageError):
        heis.from_matrix(((1, 0, 0), (1, 1, 0), (0, 0, 1)))
    with pytest.raises(UsageError):
        heis.from_matrix(((1, 0.5, 0), (0, 1, 0), (0, 0, 1)))


# -- canonical subgroup form ---------------------------------------------------------

def test_subgroup_examples():
    full = heis.subgroup_generated([heis.X, heis.Y])
    assert full.image_lattice.rational_basis() == [(1, 0), (0, 1)] and full.center_gen == 1
    cyc = heis.subgroup_generated([(2, 0, 0)])
    assert cyc.image_lattice.rational_basis() == [(2, 0)] and cyc.center_gen == 0
    sq = heis.subgroup_generated([(2, 0, 0), (0, 2, 0)])
    assert sq.image_lattice.rational_basis() == [(2, 0), (0, 2)] and sq.center_gen == 4
    assert sq.index_in_full() == 16 and full.index_in_full() == 1
    assert heis.subgroup_generated([]).generators() == []


def test_canonical_form_is_unique():
    a = heis.subgroup_generated([(2, 0, 0), (0, 2, 0)])
    b = heis.subgroup_generated([(0, 2, 0), (2, 2, 4), (2, 0, 0)])
    assert a == b
    assert heis.subgroup_generated(a.generators()) == a


def _ball12():
    return list(heis.cell_elements(heis.ball_cells(12)[-1]))


def test_membership_agrees_with_bfs_oracle():
    rng = np.random.Generator(np.random.PCG64(2024))
    ball = _ball12()
    for _ in range(50):
        k = int(rng.integers(1, 4))
        gens = [(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)), int(rng.integers(-4, 5))) for _ in range(k)]
        S = heis.subgroup_generated(gens)
        oracle = heis.bfs_subgroup_oracle(gens, box=(24, 24, 160))
        for g in ball:
            assert S.contains(g) == (g in oracle), (gens, g)
        for h in S.generators():
            assert h in oracle or max(abs(h[0]), abs(h[1])) > 24


def test_join_and_subgroup_order():
    A = heis.subgroup_generated([(2, 0, 0)])
    B = heis.subgroup_generated([(0, 3, 0)])
    J = A.join(B)
    assert A.is_subgroup_of(J) and B.is_subgroup_of(J)
    assert J.center_gen == 6
    assert not J.is_subgroup_of(A)


# -- interval DP ----------------------------------------------------------------------

def brute_power_sizes(S, n):
    cur = {heis.IDENTITY}
    out = []
    for _ in range(n):
        cur = {heis.mul(g, s) for g in cur for s in S}
        out.append(len(cur))
    return out


def test_ball_sizes_match_bfs():
    S = [heis.IDENTITY, heis.X, heis.Y, heis.inv(heis.X), heis.inv(heis.Y)]
    assert heis.ball_sizes(6)[1:] == brute_power_sizes(S, 6)
    assert heis.ball_sizes(4) == [1, 5, 17, 53, 135]


@pytest.mark.parametrize("N,n", [(1, 4), (2, 2)])
def test_tao_dp_matches_brute_force(N, n):
    N3 = N**3
    S = list(product(range(-N, N + 1), range(-N, N + 1), range(-N3, N3 + 1)))
    assert heis.power_sizes(heis.tao_stages(N), n) == brute_power_sizes(S, n)


def test_tao_generating_set_size():
    assert heis.power_sizes(heis.tao_stages(2), 1) == [5 * 5 * 17]


def test_dp_budget():
    with pytest.raises(ResourceError):
        heis.power_sizes(heis.tao_stages(3), 10, budget=100)


def test_tao_relations_hold():
    rng = np.random.Generator(np.random.PCG64(1))
    for N in (2, 3, 4):
        pts = [(int(rng.integers(-N, N + 1)), int(rng.integers(-N, N + 1)), int(rng.integers(-N**3, N**3 + 1)))
               for _ in range(50)]
        for name, word in heis.tao_relations(N, pts):
            assert heis.word_product(word) == heis.IDENTITY, name
            assert sum(abs(e) for _, e in word) <= 5
            assert all(heis.tao_generating_set_contains(g, N) for g, _ in word)
