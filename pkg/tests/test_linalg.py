import sympy
from hypothesis import given, settings, strategies as st

from koszulq import linalg
from koszulq.scalars import LaurentPoly, ONE, ZERO, qint

from oracles import cols_of, oracle_invariant_factors, to_sympy


def q(k):
    return LaurentPoly.monomial(k)


def snf(mat):
    ents = {(r, c): x for r, row in enumerate(mat) for c, x in enumerate(row) if x}
    return linalg.smith_factors(len(mat), len(mat[0]), ents)


# ---------------------------------------------------------------------------
# hand examples


def test_snf_diagonal_chain():
    a, b = q(1) + 1, q(1) - 1
    # diag(q+1, q-1) ~ diag(1, q^2-1)
    assert snf([[a, ZERO], [ZERO, b]]) == [ONE, (a * b).canonical_associate()]


def test_snf_units_are_units():
    assert snf([[q(3), ZERO], [ZERO, -2 * q(-1)]]) == [ONE, ONE]


def test_snf_qint_matrix():
    # [[1, 1], [1, q]] has determinant q - 1
    assert snf([[ONE, ONE], [ONE, q(1)]]) == [ONE, q(1) - 1]


def test_snf_zero_matrix():
    assert snf([[ZERO, ZERO]]) == []


def test_chain_normalize():
    f = linalg.chain_normalize([qint(2), qint(3)])
    assert f == [ONE, (qint(2) * qint(3)).canonical_associate()]


def test_rank_routes_small():
    m = [[ONE, q(1)], [q(1), q(2)]]
    assert linalg.rank_laurent(cols_of(m)) == 1
    assert linalg.field_rank(cols_of(m)) == 1
    m = [[ONE, ONE], [ONE, q(1)]]
    assert linalg.rank_laurent(cols_of(m)) == 2
    assert linalg.rank_at(cols_of(m), 1) == 1


def test_rref_and_nullspace():
    rows = [{0: 1, 1: 2}, {1: 1, 2: -1}]
    red = linalg.rref(rows)
    assert [p for p, _ in red] == [0, 1]
    ns = linalg.nullspace(rows, [0, 1, 2])
    assert len(ns) == 1
    v = ns[0]
    for r in rows:
        assert sum(c * v.get(k, 0) for k, c in r.items()) == 0


def test_span_equal():
    a = [{0: 1, 1: 1}, {1: 1}]
    b = [{0: 1}, {0: 2, 1: 3}]
    assert linalg.span_equal(a, b)
    assert not linalg.span_equal(a, [{0: 1}])


# ---------------------------------------------------------------------------
# properties


small_laurent = st.builds(
    lambda cs, lo: LaurentPoly(cs, lo),
    st.lists(st.integers(-2, 2), max_size=3),
    st.integers(-1, 1),
)


def matrices(elem, max_side=4):
    return st.integers(1, max_side).flatmap(
        lambda m: st.integers(1, max_side).flatmap(
            lambda n: st.lists(st.lists(elem, min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=60, deadline=None)
@given(matrices(st.integers(-3, 3), 6))
def test_rank_rational_matches_sympy(mat):
    assert linalg.rank_rational(cols_of(mat)) == sympy.Matrix(mat).rank()


@settings(max_examples=60, deadline=None)
@given(matrices(small_laurent, 4))
def test_rank_laurent_two_routes(mat):
    cols = cols_of(mat)
    r = linalg.rank_laurent(cols)
    assert r == linalg.field_rank(cols)
    M = sympy.Matrix([[to_sympy(x) for x in row] for row in mat])
    assert r == M.rank(simplify=True)


@settings(max_examples=40, deadline=None)
@given(matrices(small_laurent, 3))
def test_snf_matches_determinantal_divisors(mat):
    got = [tuple(f.coeffs) for f in snf(mat)]
    assert got == oracle_invariant_factors(mat)


@settings(max_examples=40, deadline=None)
@given(matrices(small_laurent, 4))
def test_snf_rank_and_q1(mat):
    fs = snf(mat)
    cols = cols_of(mat)
    assert len(fs) == linalg.rank_laurent(cols)
    # the rank drops at q = 1 by the number of factors divisible by q - 1
    drop = sum(1 for f in fs if f.eval_q1() == 0)
    assert linalg.rank_at(cols, 1) == len(fs) - drop
