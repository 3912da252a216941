from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from koszulq import catalog
from koszulq.ncpoly import (
    NcPoly, NotConfluent, QuadraticAlgebra, confluence_check, graded_basis, hilbert_coeffs,
    koszul_numerical_check, multiply, normal_form, parse_ncpoly, quadratic_dual,
    relation_span_equal,
)
from koszulq.scalars import LAURENT, QQ, LaurentPoly, ParseError

M = catalog.get("quantum_matrices_2x2").algebra
PLANE = catalog.get("quantum_plane").algebra


def el(alg, text):
    return parse_ncpoly(text, alg.names, alg.ring)


def polynomial_ring(n):
    names = [f"x{i}" for i in range(n)]
    rels = [el(QuadraticAlgebra(names, [], QQ), f"x{j}.x{i} - x{i}.x{j}")
            for i in range(n) for j in range(i + 1, n)]
    return QuadraticAlgebra(names, rels, QQ)


# ---------------------------------------------------------------------------
# normal forms and products


def test_normal_form_da():
    assert normal_form(el(M, "d.a"), M) == el(M, "a.d - (q - q^-1)*b.c")


def test_normal_form_ba():
    assert normal_form(el(M, "b.a"), M) == el(M, "q^-1*a.b")


def test_normal_form_ordered_word():
    w = el(M, "a.b.c.d")
    assert normal_form(w, M) == w


def test_multiply_examples():
    assert multiply(el(M, "a"), el(M, "d"), M) == el(M, "a.d")
    assert multiply(el(M, "d"), el(M, "a.d"), M) == el(M, "a.d.d - (q - q^-1)*b.c.d")
    D = quadratic_dual(PLANE)
    x = NcPoly({(0,): 1}, LAURENT)
    assert not multiply(x, x, D)


def test_parse_error_column():
    with pytest.raises(ParseError) as e:
        parse_ncpoly("a.b + e", M.names, LAURENT)
    assert e.value.column == 7


# ---------------------------------------------------------------------------
# confluence


def test_catalog_confluent():
    for name in catalog.CATALOG:
        e = catalog.get(name)
        assert confluence_check(e.algebra).confluent, name
        assert confluence_check(e.dual).confluent, name


def test_enveloping_m_confluent():
    assert confluence_check(catalog.get("poisson_matrices").enveloping).confluent


def test_broken_rules_reported():
    names = ["a", "b", "c"]
    rels = [el(QuadraticAlgebra(names, [], QQ), t) for t in ("c.b - b.b", "b.a - a.a")]
    with pytest.raises(NotConfluent):
        QuadraticAlgebra(names, rels, QQ)
    alg = QuadraticAlgebra(names, rels, QQ, check=False)
    rep = confluence_check(alg)
    assert not rep.confluent
    assert rep.lines() and rep.lines()[0].startswith("overlap c.b.a")


# ---------------------------------------------------------------------------
# bases and Hilbert series


def test_graded_basis_counts():
    assert len(graded_basis(M, 2)) == 10
    assert len(graded_basis(quadratic_dual(M), 2)) == 6
    assert graded_basis(M, 0) == [()]


def test_hilbert_examples():
    assert hilbert_coeffs(M, 3) == [1, 4, 10, 20]
    assert hilbert_coeffs(quadratic_dual(PLANE), 3) == [1, 2, 1, 0]
    env = catalog.get("poisson_matrices").enveloping
    assert hilbert_coeffs(env, 2) == [1, 8, 36]


def test_hilbert_closed_forms():
    e = catalog.get("poisson_matrices")
    assert hilbert_coeffs(M, 10) == [comb(m + 3, 3) for m in range(11)]
    assert hilbert_coeffs(e.enveloping, 8) == [comb(m + 7, 7) for m in range(9)]
    assert hilbert_coeffs(quadratic_dual(M), 10) == [comb(4, m) for m in range(11)]
    assert hilbert_coeffs(e.enveloping_dual, 10) == [comb(8, m) for m in range(11)]


def test_koszul_numerical():
    assert koszul_numerical_check(M, quadratic_dual(M), 8)
    e = catalog.get("poisson_matrices")
    assert koszul_numerical_check(e.enveloping, e.enveloping_dual, 6)
    P = polynomial_ring(3)
    assert koszul_numerical_check(P, quadratic_dual(P), 8)


# ---------------------------------------------------------------------------
# duals


def test_plane_dual_relations():
    D = quadratic_dual(PLANE)
    qq = LaurentPoly.monomial(1)
    expect = [NcPoly(t, LAURENT) for t in ({(0, 0): 1}, {(1, 1): 1}, {(0, 1): qq, (1, 0): 1})]
    assert relation_span_equal(D, QuadraticAlgebra(D.names, expect, LAURENT))


def test_m_dual_matches_transcription():
    assert relation_span_equal(quadratic_dual(M), catalog.transcribed_dual_m())


def test_polynomial_dual_is_exterior():
    P = polynomial_ring(3)
    D = quadratic_dual(P)
    assert D.square_zero == frozenset(range(3))
    assert hilbert_coeffs(D, 4) == [1, 3, 3, 1, 0]


@pytest.mark.parametrize("name", list(catalog.CATALOG))
def test_double_dual_and_dimensions(name):
    alg = catalog.get(name).algebra
    D = quadratic_dual(alg)
    assert len(alg.relations) + len(D.relations) == alg.n ** 2
    DD = quadratic_dual(D)
    # x** is identified with x
    assert relation_span_equal(QuadraticAlgebra(alg.names, DD.relations, alg.ring, check=False), alg)


# ---------------------------------------------------------------------------
# properties

m_words = st.lists(st.integers(0, 3), max_size=4).map(tuple)


@settings(max_examples=80, deadline=None)
@given(m_words)
def test_normal_form_idempotent_and_graded(w):
    p = normal_form(NcPoly({w: 1}, LAURENT), M)
    assert normal_form(p, M) == p
    assert all(len(v) == len(w) for v in p.terms)
    assert all(M.is_normal(v) for v in p.terms)


@settings(max_examples=60, deadline=None)
@given(m_words, m_words, m_words)
def test_multiply_associative(u, v, w):
    U, V, W = (normal_form(NcPoly({x: 1}, LAURENT), M) for x in (u, v, w))
    assert multiply(multiply(U, V, M), W, M) == multiply(U, multiply(V, W, M), M)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3))
def test_dual_words_squarefree(i, j):
    D = quadratic_dual(M)
    p = multiply(NcPoly({(i,): 1}, LAURENT), NcPoly({(j,): 1}, LAURENT), D)
    if i == j:
        assert not p
    assert all(len(set(w)) == len(w) for w in p.terms)


def test_laurent_coefficients_kept_exact():
    p = normal_form(el(M, "d.a.d.a"), M)
    assert all(isinstance(c, LaurentPoly) for c in p.terms.values())
