import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from koszulq import catalog
from koszulq.cocomplex import (
    GradedMatrix, NotHomogeneous, WeightVector, cce_oracle, dga_product, homotopy_matrix,
    matrix_from_json, poisson_cochain, poisson_differential, scaled_form, weight_decompose,
)
from koszulq.homology import Cohomology
from koszulq.ncpoly import hilbert_coeffs, multiply, normal_form, parse_ncpoly
from koszulq.poisson import exponent_to_word, word_to_exponent
from koszulq.scalars import LAURENT, LaurentPoly, NotDivisible, qint

QM = catalog.get("quantum_matrices_2x2")
PM = catalog.get("poisson_matrices")
QP = catalog.get("quantum_plane")
PP = catalog.get("poisson_plane")


def add(out, k, c):
    out[k] = out.get(k, 0) + c
    if not out[k]:
        del out[k]


# ---------------------------------------------------------------------------
# Hochschild side


@pytest.mark.parametrize("name", list(catalog.CATALOG))
def test_chain_dimensions(name):
    e = catalog.get(name)
    K = e.hochschild()
    h, hd = hilbert_coeffs(e.algebra, 8), hilbert_coeffs(e.dual, 8)
    for i, j in K.bidegrees(8):
        assert len(K.basis(i, j)) == hd[i] * h[j - i]


def test_plane_e0_formula():
    K = QP.hochschild()
    A = QP.algebra
    x, y = 0, 1
    for a in range(5):
        for b in range(5):
            src = {(lam, ()): c for lam, c in A.nf_word((y,) * b + (x,) * a).items()}
            expect: dict = {}
            for lam, c in A.nf_word((y,) * b + (x,) * (a + 1)).items():
                add(expect, (lam, (x,)), qint(b) * c)
            for lam, c in A.nf_word((y,) * (b + 1) + (x,) * a).items():
                add(expect, (lam, (y,)), -qint(a) * c)
            assert K.apply(src) == expect, (a, b)


def test_top_dual_class_maps_to_zero_space():
    K = QP.hochschild()
    assert K.top == 2
    m = K.matrix(2, 2)
    assert m.shape == (0, 1)


def test_scaled_matches_unscaled():
    H = QM.hochschild(scaled=False)
    S = QM.hochschild(scaled=True)
    for i, j in [(0, 2), (1, 3), (2, 4), (3, 5)]:
        assert scaled_form(H.matrix(i, j)) == S.matrix(i, j)


def test_scaled_form_rejects():
    m = GradedMatrix(0, 0, ["r"], ["c"], [{0: LaurentPoly.monomial(1) + 1}], LAURENT)
    with pytest.raises(NotDivisible):
        scaled_form(m)
    z = GradedMatrix(0, 0, ["r"], ["c"], [{}], LAURENT)
    assert scaled_form(z) == z


@pytest.mark.parametrize("entry,limit", [(QM, PM), (QP, PP)], ids=["M", "plane"])
def test_scaled_at_q1_is_poisson(entry, limit):
    H = entry.hochschild()
    P = limit.poisson()
    for i, j in H.bidegrees(6):
        assert H.matrix(i, j).at_q1().same_map(P.matrix(i, j)), (i, j)


def test_delta_q_central_and_closed():
    A = QM.algebra
    dq = parse_ncpoly("a.d - q*b.c", A.names, LAURENT)
    for g in A.names:
        x = parse_ncpoly(g, A.names, LAURENT)
        assert multiply(x, dq, A) == multiply(dq, x, A)
    K = QM.hochschild()
    assert not K.apply({(w, ()): c for w, c in normal_form(dq, A).terms.items()})


@pytest.mark.parametrize("name", list(catalog.CATALOG))
def test_d_squared_zero(name):
    e = catalog.get(name)
    complexes = [e.hochschild()] + ([e.poisson()] if e.bracket is not None else [])
    for K in complexes:
        C = Cohomology(K)
        for i, j in K.bidegrees(10):
            assert C.d_squared_zero(i, j), (name, i, j)


# ---------------------------------------------------------------------------
# Poisson side


def test_poisson_d_of_a():
    B = PM.bracket
    K = PM.poisson()
    expect = poisson_cochain(B, [("-a*b", "b"), ("-a*c", "c"), ("-2*b*c", "d")])
    assert K.apply(poisson_cochain(B, [("a", "")])) == expect


def test_poisson_d_of_center():
    B = PM.bracket
    K = PM.poisson()
    assert not K.apply(poisson_cochain(B, [("1", "")]))
    for m in range(1, 4):
        assert not K.apply(poisson_cochain(B, [(f"(a*d - b*c)^{m}", "")]))


def he_eh(K, key):
    out: dict = {}
    for k1, c1 in K.image(key).items():
        for k2, c2 in K.homotopy_image(k1).items():
            add(out, k2, c1 * c2)
    for k1, c1 in K.homotopy_image(key).items():
        for k2, c2 in K.image(k1).items():
            add(out, k2, c1 * c2)
    return out


def test_homotopy_examples():
    B = PM.bracket
    K = PM.poisson()
    (key,) = poisson_cochain(B, [("a", "d")])
    assert he_eh(K, key) == {key: -4}
    (key,) = poisson_cochain(B, [("1", "")])
    assert he_eh(K, key) == {}
    (key,) = poisson_cochain(B, [("b*c", "bc")])
    assert he_eh(K, key) == {}


def test_homotopy_eigenvalues():
    K = PM.poisson()
    for i, j in K.bidegrees(6):
        for key in K.basis(i, j):
            lam, mu = key
            e = word_to_exponent(lam, 4)
            val = 2 * (e[3] - (3 in mu) - e[0] + (0 in mu))
            assert he_eh(K, key) == ({key: val} if val else {}), K.label(key)


def test_homotopy_matrix_shape():
    m = homotopy_matrix(PM.bracket, 1, 3)
    assert m.shape == (len(PM.poisson().basis(0, 1)), len(PM.poisson().basis(1, 3)))


def test_nonzero_grade_blocks_exact():
    C = Cohomology(PM.poisson(), catalog.grade_weights())
    for i, j in C.K.bidegrees(10):
        for w in C.blocks(i, j):
            if w != (0,):
                assert C.dim(i, j, weight=w) == 0, (i, j, w)


def test_grade_preserved():
    for K in (QM.hochschild(), PM.poisson()):
        for i, j in K.bidegrees(6):
            weight_decompose(K.matrix(i, j), K, catalog.grade_weights())


def test_weight_decompose_example():
    K = PM.poisson()
    m = K.matrix(0, 2)
    blocks = dict(weight_decompose(m, K, catalog.grade_weights()))
    label = {w: set(b.cols) for w, b in blocks.items()}
    assert {"a.a|1"} == label[(2,)]
    assert {"a.b|1", "a.c|1"} == label[(1,)]
    assert {"a.d|1", "b.b|1", "b.c|1", "c.c|1"} == label[(0,)]
    (whole,) = weight_decompose(m, K, [WeightVector([0, 0, 0, 0])])
    assert whole[1] is m


def test_weight_decompose_rejects():
    K = PM.poisson()
    with pytest.raises(NotHomogeneous):
        weight_decompose(K.matrix(0, 2), K, [WeightVector([1, 0, 0, 0])])


def test_grade_zero_centre_block():
    K = PM.poisson()
    for m in range(1, 4):
        zero = [k for k in K.basis(0, 2 * m) if K.weight_of(k, catalog.grade_weights()) == (0,)]
        for lam, _ in zero:
            e = word_to_exponent(lam, 4)
            assert e[0] == e[3]


# ---------------------------------------------------------------------------
# CCE oracle


@pytest.mark.parametrize("entry", [PM, PP], ids=["M", "plane"])
def test_cce_oracle_matches(entry):
    for i, j in entry.poisson().bidegrees(6):
        assert cce_oracle(entry.bracket, i, j) == poisson_differential(entry.bracket, i, j), (i, j)


def test_cce_degree_one_values():
    B = PM.bracket
    m = cce_oracle(B, 0, 1)
    for c, (lam, _) in enumerate(m.col_keys):
        (i,) = lam
        got = {m.row_keys[r]: x for r, x in m.columns[c].items()}
        expect: dict = {}
        for jj in range(4):
            for e, x in B.bracket(jj, i).terms.items():
                add(expect, (exponent_to_word(e), (jj,)), x)
        assert got == expect


def test_cce_zero_bracket():
    from koszulq.poisson import PoissonBracket
    B = PoissonBracket(["x", "y"])
    assert cce_oracle(B, 0, 0).is_zero()


# ---------------------------------------------------------------------------
# DGA product


def test_dga_unit_and_disjoint():
    A, D = QM.algebra, QM.dual
    u = {((0, 1), (2,)): LaurentPoly.monomial(1)}
    one = {((), ()): 1}
    assert dga_product(one, u, A, D) == u
    assert dga_product({((0,), ()): 1}, {((), (0,)): 1}, A, D) == {((0,), (0,)): 1}


def random_cochain(K, rng, top):
    i, j = rng.choice(K.bidegrees(top))
    keys = K.basis(i, j)
    return {k: rng.randint(-2, 2) for k in rng.sample(keys, min(2, len(keys)))}, i


def derivation_holds(K, u, v, i, rule):
    uv = K.product(u, v, rule)
    lhs = K.apply(uv)
    rhs: dict = {}
    for k, c in K.product(K.apply(u), v, rule).items():
        add(rhs, k, c)
    s = -1 if i % 2 else 1
    for k, c in K.product(u, K.apply(v), rule).items():
        add(rhs, k, s * c)
    return lhs == rhs


def homogeneous(K, top):
    """Strategy: (cochain, homological degree) supported in one bidegree."""
    degs = K.bidegrees(top)

    @st.composite
    def cochains(draw):
        i, j = draw(st.sampled_from(degs))
        keys = K.basis(i, j)
        picked = draw(st.lists(st.sampled_from(keys), min_size=1, max_size=3, unique=True))
        coeffs = draw(st.lists(st.integers(-2, 2).filter(bool), min_size=len(picked), max_size=len(picked)))
        return dict(zip(picked, coeffs)), i

    return cochains()


@settings(max_examples=60, deadline=None)
@given(homogeneous(QP.hochschild(), 5), homogeneous(QP.hochschild(), 5))
def test_derivation_plain_plane(a, b):
    (u, i), (v, _) = a, b
    assert derivation_holds(QP.hochschild(), u, v, i, "plain")


@settings(max_examples=60, deadline=None)
@given(homogeneous(QM.hochschild(), 4), homogeneous(QM.hochschild(), 4))
def test_derivation_plain_m(a, b):
    (u, i), (v, _) = a, b
    assert derivation_holds(QM.hochschild(), u, v, i, "plain")


def test_derivation_other_rules_fail():
    rng = random.Random(11)
    K = QM.hochschild()
    for rule in ("internal", "homological"):
        fails = 0
        for _ in range(100):
            u, i = random_cochain(K, rng, 4)
            v, _ = random_cochain(K, rng, 4)
            fails += not derivation_holds(K, u, v, i, rule)
        assert fails, rule


def test_matrix_json_roundtrip():
    m = QM.hochschild().matrix(1, 3)
    data = json.loads(m.dumps())
    assert set(data) == {"i", "j", "rows", "cols", "entries"}
    assert matrix_from_json(data, LAURENT) == m
