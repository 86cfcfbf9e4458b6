from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilgrowth import harmonious as hm
from nilgrowth.errors import ConstantTableError, ResourceError, UsageError
from nilgrowth.harmonious import (GradedLattice, bracket_closure, default_constants, folner_count, h_minus, h_plus,
                                  index_sandwich_bound_check, is_harmonious, multiplicative_index)
from nilgrowth.heisenberg import to_log
from nilgrowth.lattice import span_z, standard_lattice
from nilgrowth.lie import bch, build_hall_basis, heisenberg_algebra

F = Fraction
H = heisenberg_algebra()
GENS = [H.element((1, 0, 0)), H.element((0, 1, 0))]
LOG_GAMMA = hm.integer_heisenberg_log_set()


def lat(*rows):
    return GradedLattice(H, span_z(rows, 3))


OUTER = lat((1, 0, 0), (0, 1, 0), (0, 0, F(1, 2)))
INNER = lat((2, 0, 0), (0, 2, 0), (0, 0, 1))


class IntegerHeisenberg:
    """H(Z) in log coordinates, as a subgroup handle for coset enumeration."""

    generators = GENS
    contains = staticmethod(LOG_GAMMA.contains)


def test_example_non_additive_witness():
    v = is_harmonious(LOG_GAMMA)
    assert v.is_additive_subgroup is False
    X, Y, S = v.additive_witness
    assert (X.coords, Y.coords, S.coords) == ((1, 0, 0), (0, 1, 0), (1, 1, 0))
    assert v.conclusion is False


def test_harmonious_examples():
    assert is_harmonious(OUTER).conclusion is True
    assert is_harmonious(INNER).conclusion is True
    z3 = is_harmonious(lat((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert z3.is_bracket_closed is True and z3.is_group_closed is False
    assert z3.status == "not-harmonious"
    # not bracket closed: [X, Y] = (0,0,1) escapes 2Z in the centre
    v = is_harmonious(lat((1, 0, 0), (0, 1, 0), (0, 0, 2)))
    assert v.is_bracket_closed is False and v.bracket_witness is not None


def test_grid_budget_gives_inconclusive():
    v = is_harmonious(OUTER, grid_budget=10)
    assert v.conclusion is None and v.status == "inconclusive"


def test_bracket_closure_examples():
    assert bracket_closure(GENS).lattice == standard_lattice(3)
    assert bracket_closure(OUTER.basis_elements()) == OUTER
    assert bracket_closure([GENS[0]]).lattice == span_z([(1, 0, 0)], 3)


def test_constant_table():
    assert default_constants(1) == hm.ConstantTable(1, 1, 1, "proven-small-step")
    assert default_constants(2) == hm.ConstantTable(2, 2, 2, "proven-small-step")
    c3 = default_constants(3)
    assert (c3.C1, c3.C2, c3.provenance) == (6, 6**6, "zassenhaus-lcm")
    c4 = default_constants(4)
    assert (c4.C1, c4.C2) == (24, 24**9)
    assert default_constants(2, C1=4).provenance == "user-override"
    with pytest.raises(UsageError):
        default_constants(5)
    with pytest.raises(UsageError):
        hm.ConstantTable(2, 0, 1, "proven-small-step")


def test_sandwich_example():
    c = default_constants(2)
    lo, hi = h_minus(GENS, c), h_plus(GENS, c)
    assert lo == INNER and hi == OUTER
    rep = index_sandwich_bound_check(GENS, c)
    assert (rep.additive_index, rep.multiplicative_index, rep.bound) == (8, 8, 64)
    assert rep.verdict
    data = rep.to_json()
    assert list(data) == ["gamma_spec", "C1", "C2", "provenance", "h_minus_basis", "h_plus_basis",
                          "additive_index", "multiplicative_index", "bound", "verdict"]


def test_sandwich_containments_on_ball():
    c = default_constants(2)
    chk = hm.sandwich_containments(GENS, c, h_minus(GENS, c), h_plus(GENS, c), radius=4,
                                   gamma_contains=LOG_GAMMA.contains)
    assert chk.ok and chk.checked > 100


def test_too_small_constant_fails_loudly():
    B = build_hall_basis(2, 3)
    gens = [B.generator(0), B.generator(1)]
    for c1 in (1, 3):
        with pytest.raises(ConstantTableError) as exc:
            h_minus(gens, default_constants(3, C1=c1))
        assert exc.value.counterexample["status"] == "not-harmonious"
    # step 2 with C1 = 1: harmonious, but the containment H- in log Γ fails
    c = default_constants(2, C1=1)
    chk = hm.sandwich_containments(GENS, c, h_minus(GENS, c), h_plus(GENS, c), radius=2,
                                   gamma_contains=LOG_GAMMA.contains)
    assert not chk.ok


def test_abelian_and_cyclic_cases():
    A = build_hall_basis(2, 1)
    gens = [A.element((1, 0)), A.element((0, 1))]
    c = default_constants(1)
    assert h_minus(gens, c).lattice == standard_lattice(2)
    assert index_sandwich_bound_check(gens, c).additive_index == 1
    assert h_minus([GENS[0]], default_constants(2)).lattice == span_z([(2, 0, 0)], 3)


def test_step_three_sandwich():
    B = build_hall_basis(2, 3)
    gens = [B.generator(0), B.generator(1)]
    c = default_constants(3)
    lo, hi = h_minus(gens, c), h_plus(gens, c)
    assert lo.lattice.is_sublattice_of(hi.lattice)
    assert is_harmonious(lo).conclusion and is_harmonious(hi).conclusion


def test_multiplicative_index_examples():
    assert multiplicative_index(INNER, OUTER) == 8
    assert multiplicative_index(OUTER, OUTER) == 1
    assert multiplicative_index(IntegerHeisenberg(), OUTER) == 2
    with pytest.raises(UsageError):
        multiplicative_index(OUTER, INNER)
    with pytest.raises(ResourceError):
        multiplicative_index(INNER.scaled(4), OUTER, budget=50)


def test_scaling_closure_on_ball():
    """X in 2·logΓ and Y in logΓ give X + Y in logΓ."""
    ball = hm.enumerate_gamma(GENS, 3)
    for X in ball:
        for Y in ball:
            assert LOG_GAMMA.contains(2 * X + Y)


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-3, 3)] * 3), st.tuples(*[st.integers(-3, 3)] * 3))
def test_outer_lattice_is_bch_closed(u, v):
    X = sum((c * b for c, b in zip(u, OUTER.basis_elements())), H.zero())
    Y = sum((c * b for c, b in zip(v, OUTER.basis_elements())), H.zero())
    assert OUTER.contains(bch(X, Y)) and INNER.contains(bch(2 * X, 2 * Y))


def test_span_log_gamma_is_outer_lattice():
    assert hm.span_log_gamma(GENS) == OUTER
    logs = [H.element(to_log(g)) for g in [(1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 1, 3)]]
    assert all(OUTER.contains(x) for x in logs)


def test_folner_examples():
    Z3 = lat((1, 0, 0), (0, 1, 0), (0, 0, 1))
    n = folner_count(Z3, 32)
    assert n == 65**2 * 2049
    assert abs(F(n, 32**4) - 8) / 8 < F(15, 100)
    assert folner_count(Z3, F(1, 2)) == 1
    n2 = folner_count(Z3.scaled(2), 32)
    assert abs(F(n2 * 8, n) - 1) < F(1, 10)
    with pytest.raises(UsageError):
        folner_count(lat((1, 0, 0)), 4)


def test_bch_group_law_on_outer_lattice():
    for X in OUTER.basis_elements():
        for Y in OUTER.basis_elements():
            assert OUTER.contains(bch(X, Y)) and OUTER.contains(bch(X, -Y))
