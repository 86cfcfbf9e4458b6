from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilgrowth import lie
from nilgrowth.errors import ResourceError, UsageError
from nilgrowth.lie import (_aadd, _aexp, _amul, bch, bracket, build_hall_basis, dilate, heisenberg_element,
                           zassenhaus_terms)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def elements(B):
    return st.lists(rationals, min_size=B.dim, max_size=B.dim).map(B.element)


def to_assoc(X):
    """Image of a Lie element in the truncated free associative algebra."""
    out = {}
    for c, e in zip(X.coords, X.basis.expansions):
        if c:
            out = _aadd(out, e, 1, c)
    return out


# -- Hall basis ------------------------------------------------------------------

def test_witt_dimensions():
    assert build_hall_basis(2, 6).dims_by_degree() == [2, 1, 2, 3, 6, 9]
    assert build_hall_basis(3, 3).dims_by_degree() == [3, 3, 8]
    assert [lie.mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_basis_ids_and_trees():
    B = build_hall_basis(2, 3)
    assert B.basis_id == "free-k2-s3"
    assert [B.tree(i) for i in range(B.dim)] == ["X", "Y", "[X,Y]", "[X,[X,Y]]", "[Y,[X,Y]]"]
    assert lie.basis_from_id("free-k2-s3") is B


def test_ceilings():
    with pytest.raises(UsageError):
        build_hall_basis(0, 2)
    with pytest.raises(ResourceError):
        build_hall_basis(2, 7)
    with pytest.raises(ResourceError):
        build_hall_basis(5, 2)


def test_structure_constants_heisenberg():
    H = lie.heisenberg_algebra()
    X, Y = H.generator(0), H.generator(1)
    assert bracket(X, Y) == H.element((0, 0, 1))
    assert bracket(Y, X) == H.element((0, 0, -1))
    assert bracket(bracket(X, Y), X).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_bracket_antisymmetric_and_jacobi(data):
    B = build_hall_basis(2, 4)
    X, Y, Z = (data.draw(elements(B)) for _ in range(3))
    assert bracket(X, Y) == -bracket(Y, X)
    jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
    assert jac.is_zero()


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_bracket_matches_associative_commutator(data):
    B = build_hall_basis(3, 3)
    X, Y = data.draw(elements(B)), data.draw(elements(B))
    a, b = to_assoc(X), to_assoc(Y)
    comm = _aadd(_amul(a, b, 3), _amul(b, a, 3), 1, -1)
    assert to_assoc(bracket(X, Y)) == comm


def test_basis_mismatch_is_usage_error():
    A, B = build_hall_basis(2, 2), build_hall_basis(2, 3)
    with pytest.raises(UsageError):
        A.generator(0) + B.generator(0)
    with pytest.raises(UsageError):
        bracket(A.generator(0), B.generator(1))
    with pytest.raises(UsageError):
        A.element((1, 2))


# -- BCH and Zassenhaus --------------------------------------------------------

def test_zassenhaus_low_degree_coefficients():
    g2, g3 = zassenhaus_terms(3)
    assert [(t.coefficient, t.monomial) for t in g2] == [(Fraction(-1, 2), "[X,Y]")]
    # 1/6 (2[Y,[X,Y]] + [X,[X,Y]])
    assert [(t.coefficient, t.monomial) for t in g3] == [(Fraction(1, 6), "[X,[X,Y]]"),
                                                         (Fraction(1, 3), "[Y,[X,Y]]")]
    assert zassenhaus_terms(1) == []
    assert [g[0].degree for g in zassenhaus_terms(4)] == [2, 3, 4]


def test_bch_low_degree_coefficients():
    B = build_hall_basis(2, 3)
    Z = bch(B.generator(0), B.generator(1))
    assert Z.coords == (1, 1, Fraction(1, 2), Fraction(1, 12), Fraction(-1, 12))


@pytest.mark.parametrize("k,s", [(2, 2), (2, 3), (2, 4), (3, 2)])
def test_zassenhaus_identity_two_routes(k, s):
    """exp(X+Y) = exp(X) exp(Y) prod exp(L_n), once via BCH and once as associative series."""
    import numpy as np
    rng = np.random.Generator(np.random.PCG64(k * 10 + s))
    B = build_hall_basis(k, s)
    terms = zassenhaus_terms(s)
    for _ in range(15):
        X, Y = (B.element([Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(B.dim)])
                for _ in range(2))
        assert lie.zassenhaus_product(X, Y) == X + Y
        rhs = _amul(_aexp(to_assoc(X), s), _aexp(to_assoc(Y), s), s)
        for grp in terms:
            rhs = _amul(rhs, _aexp(to_assoc(lie.evaluate_terms(grp, X, Y)), s), s)
        assert rhs == _aexp(to_assoc(X + Y), s)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_bch_is_a_group_law(data):
    B = build_hall_basis(2, 4)
    X, Y, Z = (data.draw(elements(B)) for _ in range(3))
    assert bch(bch(X, Y), Z) == bch(X, bch(Y, Z))
    assert bch(X, -X).is_zero()
    assert bch(X, B.zero()) == X
    # exp(X ⋄ Y) = exp(X) exp(Y) in the associative model
    s = B.s
    assert _aexp(to_assoc(bch(X, Y)), s) == _amul(_aexp(to_assoc(X), s), _aexp(to_assoc(Y), s), s)


@settings(max_examples=30, deadline=None)
@given(st.data(), st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8))
def test_dilation_is_automorphism(data, lam):
    B = build_hall_basis(2, 3)
    X, Y = data.draw(elements(B)), data.draw(elements(B))
    assert dilate(lam, bch(X, Y)) == bch(dilate(lam, X), dilate(lam, Y))
    assert dilate(lam, bracket(X, Y)) == bracket(dilate(lam, X), dilate(lam, Y))


def test_dilate_rejects_nonpositive():
    X = heisenberg_element(1, 1, 1)
    for lam in (0, -1, Fraction(-1, 2)):
        with pytest.raises(UsageError):
            dilate(lam, X)


@settings(max_examples=40, deadline=None)
@given(st.data(), st.fractions(min_value=Fraction(1, 4), max_value=6, max_denominator=4))
def test_pnorm_homogeneous(data, lam):
    B = build_hall_basis(2, 3)
    X = data.draw(elements(B))
    assert lie.pnorm(dilate(lam, X)) == pytest.approx(float(lam) * lie.pnorm(X), rel=1e-12, abs=1e-12)
    assert lie.pnorm_le(dilate(lam, X), lam * Fraction(lie.pnorm(X)).limit_denominator(10**9) + Fraction(1, 10**6))


def test_pnorm_examples():
    assert lie.pnorm(heisenberg_element(1, 0, 4)) == 2.0
    assert lie.pnorm_le(heisenberg_element(1, 0, 4), 2)
    assert not lie.pnorm_le(heisenberg_element(1, 0, 5), 2)
    assert lie.pnorm(heisenberg_element(0, 0, 2)) == pytest.approx(2 ** 0.5)


# -- Heisenberg model ----------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(rationals, rationals, rationals, rationals, rationals, rationals)
def test_heisenberg_bch_formula(a, b, c, x, y, z):
    X, Y = heisenberg_element(a, b, c), heisenberg_element(x, y, z)
    assert bch(X, Y) == heisenberg_element(a + x, b + y, c + z + (a * y - b * x) / 2)


@settings(max_examples=50, deadline=None)
@given(rationals, rationals, rationals, rationals, rationals, rationals)
def test_heisenberg_exp_log(a, b, c, x, y, z):
    X, Y = heisenberg_element(a, b, c), heisenberg_element(x, y, z)
    g = lie.heisenberg_exp(lie.lie_matrix(X))
    assert lie.element_from_lie_matrix(lie.heisenberg_log(g)) == X
    h = lie.heisenberg_exp(lie.lie_matrix(Y))
    prod = lie.matmul(g, h)
    assert lie.element_from_lie_matrix(lie.heisenberg_log(prod)) == bch(X, Y)


def test_heisenberg_exp_validation():
    with pytest.raises(UsageError):
        lie.heisenberg_exp(((1, 0, 0), (0, 0, 0), (0, 0, 0)))
    with pytest.raises(UsageError):
        lie.heisenberg_log(((2, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(UsageError):
        lie.heisenberg_exp([[0, 1], [0, 0]])


def test_element_json_round_trip():
    B = build_hall_basis(3, 2)
    X = B.element([Fraction(1, 3), -2, 0, 5, Fraction(-7, 2), 1])
    assert lie.element_from_json(lie.element_to_json(X)) == X
    with pytest.raises(UsageError):
        lie.element_from_json({"basis_id": "nonsense", "coords": []})


def test_basis_table_rows():
    rows = lie.basis_table_rows(lie.heisenberg_algebra())
    assert [r["tree"] for r in rows] == ["X", "Y", "[X,Y]"]
    assert rows[0]["brackets"] == "[e0,e1]=1*e2"
